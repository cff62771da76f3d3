#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bsdelab {

/**
 * Polynomial feature map for least-squares conditional expectations.
 *
 * Features are all monomials of total degree <= degree in the standardized
 * state x = B_{t_i} / sqrt(t_i). Standardizing changes the coordinates of the
 * polynomial space, not the space itself, and keeps the Gram matrix well
 * conditioned at small t_i.
 */
struct RegressionBasis {
    std::size_t degree = 3;

    std::size_t feature_count(std::size_t dims) const;
    std::string rule() const;
    // Exponent vectors ordered by total degree, then lexicographically.
    std::vector<std::vector<unsigned>> exponents(std::size_t dims) const;
};

// True when every entry equals the first one (bitwise).
bool is_constant(std::span<const double> values);

// Design matrix, row-major [path][feature].
struct DesignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
};

// Features of the standardized states; `states` is [path][dim].
DesignMatrix build_design(const RegressionBasis& basis, std::span<const double> states,
                          std::size_t dims, double scale, unsigned workers);

/**
 * Least-squares projector onto the span of a design matrix.
 *
 * The Gram matrix is factored once with column-pivoted QR and reused for
 * every target. A target that is constant across paths projects to itself
 * exactly, without touching the factorization.
 */
class Projector {
public:
    Projector(const DesignMatrix& design, unsigned workers);

    std::size_t rank() const noexcept { return rank_; }
    std::size_t features() const noexcept { return design_->cols; }
    bool full_rank() const noexcept { return rank_ == design_->cols; }

    std::vector<double> project(std::span<const double> target) const;

private:
    const DesignMatrix* design_;
    unsigned workers_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    std::size_t rank_ = 0;
};

}  // namespace bsdelab
