#include "bsdelab/time_grid.hpp"

#include <cmath>
#include <string>

#include "bsdelab/error.hpp"

namespace bsdelab {

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidArgument("time grid: horizon must be positive and finite, got " +
                              std::to_string(horizon));
    }
    if (steps == 0) {
        throw InvalidArgument("time grid: steps must be at least 1");
    }
    std::vector<double> nodes(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        nodes[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    }
    nodes.back() = horizon;
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2) {
        throw InvalidArgument("time grid: need at least two nodes");
    }
    if (nodes.front() != 0.0) {
        throw InvalidArgument("time grid: first node must be exactly 0");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1]) || !std::isfinite(nodes[i])) {
            throw InvalidArgument("time grid: nodes must be finite and strictly increasing (index " +
                                  std::to_string(i) + ")");
        }
    }
    return TimeGrid(std::move(nodes));
}

TimeGrid make_uniform_grid(double horizon, std::size_t steps) {
    return TimeGrid::uniform(horizon, steps);
}

}  // namespace bsdelab
