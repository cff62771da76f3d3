#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bsdelab {

/**
 * Partition 0 = t_0 < t_1 < ... < t_N = T of a finite horizon.
 *
 * Node i carries the information available up to time t_i; every process in
 * the library is indexed by node.
 */
class TimeGrid {
public:
    static TimeGrid uniform(double horizon, std::size_t steps);
    // Throws InvalidArgument unless nodes start at exactly 0 and increase strictly.
    static TimeGrid from_nodes(std::vector<double> nodes);

    double horizon() const noexcept { return nodes_.back(); }
    std::size_t steps() const noexcept { return nodes_.size() - 1; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double dt(std::size_t step) const { return nodes_[step + 1] - nodes_[step]; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
    std::vector<double> nodes_;
};

TimeGrid make_uniform_grid(double horizon, std::size_t steps);

}  // namespace bsdelab
