#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bsdelab/time_grid.hpp"

namespace bsdelab {

enum class StreamLayout {
    // Path i draws from Philox substream i of the master seed; its increments
    // are normal numbers 0 .. N*d-1 of that substream in (step, dim) order.
    per_path_counter,
};

struct SeedSpec {
    std::uint64_t master_seed = 0;
    StreamLayout layout = StreamLayout::per_path_counter;
};

/**
 * M paths of d-dimensional Brownian increments on a TimeGrid.
 *
 * Increments are stored path-major as [path][step][dim]; levels B_{t_i} are
 * prefix sums and are derived on demand. Immutable after construction.
 */
class BrownianBatch {
public:
    // Wraps caller-supplied increments (tests, replays). Size must be M*N*d.
    static BrownianBatch from_increments(TimeGrid grid, std::size_t dims, std::size_t paths,
                                         std::vector<double> increments, SeedSpec seed = {});

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dims() const noexcept { return dims_; }
    std::size_t paths() const noexcept { return paths_; }
    std::size_t steps() const noexcept { return grid_.steps(); }
    const SeedSpec& seed() const noexcept { return seed_; }

    double increment(std::size_t path, std::size_t step, std::size_t dim) const {
        return increments_[(path * steps() + step) * dims_ + dim];
    }
    // All N*d increments of one path.
    std::span<const double> path_increments(std::size_t path) const {
        return std::span<const double>(increments_).subspan(path * steps() * dims_, steps() * dims_);
    }
    std::span<const double> increments() const noexcept { return increments_; }

private:
    friend BrownianBatch simulate_brownian(const TimeGrid&, std::size_t, std::size_t, SeedSpec,
                                           unsigned);
    BrownianBatch(TimeGrid grid, std::size_t dims, std::size_t paths, std::vector<double> increments,
                  SeedSpec seed);

    TimeGrid grid_;
    std::size_t dims_;
    std::size_t paths_;
    std::vector<double> increments_;
    SeedSpec seed_;
};

// Fills `out` (size N*d) with the increments of path `path`. Pure function of
// its arguments; simulate_brownian is this applied to every path index.
void generate_path_increments(const TimeGrid& grid, std::size_t dims, SeedSpec seed,
                              std::size_t path, std::span<double> out);

BrownianBatch simulate_brownian(const TimeGrid& grid, std::size_t dims, std::size_t paths,
                                SeedSpec seed, unsigned workers = 1);

// B at nodes 0..N of one path, flattened [node][dim]; length (N+1)*d.
std::vector<double> path_values(const BrownianBatch& batch, std::size_t path);

// B at every node of every path, flattened [path][node][dim].
std::vector<double> brownian_levels(const BrownianBatch& batch, unsigned workers = 1);

}  // namespace bsdelab
