#include "bsdelab/brownian.hpp"

#include <cmath>
#include <string>

#include "bsdelab/error.hpp"
#include "bsdelab/parallel.hpp"
#include "bsdelab/philox.hpp"

namespace bsdelab {

BrownianBatch::BrownianBatch(TimeGrid grid, std::size_t dims, std::size_t paths,
                             std::vector<double> increments, SeedSpec seed)
    : grid_(std::move(grid)),
      dims_(dims),
      paths_(paths),
      increments_(std::move(increments)),
      seed_(seed) {}

BrownianBatch BrownianBatch::from_increments(TimeGrid grid, std::size_t dims, std::size_t paths,
                                             std::vector<double> increments, SeedSpec seed) {
    if (dims == 0 || paths == 0) {
        throw InvalidArgument("brownian batch: dims and paths must be at least 1");
    }
    if (increments.size() != paths * grid.steps() * dims) {
        throw InvalidArgument("brownian batch: expected " +
                              std::to_string(paths * grid.steps() * dims) + " increments, got " +
                              std::to_string(increments.size()));
    }
    return BrownianBatch(std::move(grid), dims, paths, std::move(increments), seed);
}

void generate_path_increments(const TimeGrid& grid, std::size_t dims, SeedSpec seed,
                              std::size_t path, std::span<double> out) {
    CounterStream stream(seed.master_seed, path);
    const std::size_t steps = grid.steps();
    for (std::size_t i = 0; i < steps; ++i) {
        const double scale = std::sqrt(grid.dt(i));
        for (std::size_t j = 0; j < dims; ++j) {
            out[i * dims + j] = scale * stream.next_normal();
        }
    }
}

BrownianBatch simulate_brownian(const TimeGrid& grid, std::size_t dims, std::size_t paths,
                                SeedSpec seed, unsigned workers) {
    if (dims == 0 || paths == 0) {
        throw InvalidArgument("simulate_brownian: dims and paths must be at least 1");
    }
    const std::size_t per_path = grid.steps() * dims;
    std::vector<double> increments(paths * per_path);
    parallel_for(paths, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            generate_path_increments(
                grid, dims, seed, m,
                std::span<double>(increments).subspan(m * per_path, per_path));
        }
    });
    return BrownianBatch(grid, dims, paths, std::move(increments), seed);
}

std::vector<double> path_values(const BrownianBatch& batch, std::size_t path) {
    if (path >= batch.paths()) {
        throw InvalidArgument("path_values: path index " + std::to_string(path) +
                              " out of range (paths = " + std::to_string(batch.paths()) + ")");
    }
    const std::size_t d = batch.dims();
    std::vector<double> values((batch.steps() + 1) * d, 0.0);
    const auto inc = batch.path_increments(path);
    for (std::size_t i = 0; i < batch.steps(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            values[(i + 1) * d + j] = values[i * d + j] + inc[i * d + j];
        }
    }
    return values;
}

std::vector<double> brownian_levels(const BrownianBatch& batch, unsigned workers) {
    const std::size_t d = batch.dims();
    const std::size_t stride = (batch.steps() + 1) * d;
    std::vector<double> levels(batch.paths() * stride, 0.0);
    parallel_for(batch.paths(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            const auto inc = batch.path_increments(m);
            double* row = levels.data() + m * stride;
            for (std::size_t i = 0; i < batch.steps(); ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    row[(i + 1) * d + j] = row[i * d + j] + inc[i * d + j];
                }
            }
        }
    });
    return levels;
}

}  // namespace bsdelab
