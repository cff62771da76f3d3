#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsdelab {

// Precondition on an argument failed (bad size, index, range).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation invoked on an object that does not satisfy its contract,
// e.g. an (H1)-gated routine called with a quadratic driver.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Numerical breakdown (rank-deficient regression, degenerate ratio).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RankDeficient : public NumericalFailure {
public:
    RankDeficient(std::size_t step, std::size_t rank, std::size_t features)
        : NumericalFailure("rank-deficient regression at step " + std::to_string(step) +
                           " (rank " + std::to_string(rank) + " of " +
                           std::to_string(features) + ")"),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class DegenerateRatio : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace bsdelab
