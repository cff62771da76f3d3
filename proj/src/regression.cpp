#include "bsdelab/regression.hpp"

#include <algorithm>
#include <cmath>

#include "bsdelab/error.hpp"
#include "bsdelab/parallel.hpp"

namespace bsdelab {
namespace {

void enumerate(std::size_t dims, unsigned remaining, std::vector<unsigned>& current, std::size_t pos,
               std::vector<std::vector<unsigned>>& out) {
    if (pos + 1 == dims) {
        current[pos] = remaining;
        out.push_back(current);
        return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
        current[pos] = e;
        enumerate(dims, remaining - e, current, pos + 1, out);
    }
}

}  // namespace

bool is_constant(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; });
}

std::vector<std::vector<unsigned>> RegressionBasis::exponents(std::size_t dims) const {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> current(dims, 0);
    for (unsigned total = 0; total <= degree; ++total) {
        enumerate(dims, total, current, 0, out);
    }
    return out;
}

std::size_t RegressionBasis::feature_count(std::size_t dims) const {
    // C(dims + degree, degree)
    std::size_t c = 1;
    for (std::size_t k = 1; k <= degree; ++k) {
        c = c * (dims + k) / k;
    }
    return c;
}

std::string RegressionBasis::rule() const {
    return "monomials of total degree <= " + std::to_string(degree) +
           " in B_t/sqrt(t) (constant only at t = 0)";
}

DesignMatrix build_design(const RegressionBasis& basis, std::span<const double> states,
                          std::size_t dims, double scale, unsigned workers) {
    const auto exps = basis.exponents(dims);
    const std::size_t rows = states.size() / dims;
    DesignMatrix dm{rows, exps.size(), std::vector<double>(rows * exps.size())};
    const double inv = 1.0 / scale;
    parallel_for(rows, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> x(dims);
        for (std::size_t m = begin; m < end; ++m) {
            for (std::size_t j = 0; j < dims; ++j) {
                x[j] = states[m * dims + j] * inv;
            }
            double* row = dm.data.data() + m * dm.cols;
            for (std::size_t f = 0; f < exps.size(); ++f) {
                double v = 1.0;
                for (std::size_t j = 0; j < dims; ++j) {
                    for (unsigned e = 0; e < exps[f][j]; ++e) {
                        v *= x[j];
                    }
                }
                row[f] = v;
            }
        }
    });
    return dm;
}

Projector::Projector(const DesignMatrix& design, unsigned workers)
    : design_(&design), workers_(workers) {
    const std::size_t p = design.cols;
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd gram = block_reduce(
        design.rows, workers, zero,
        [&](std::size_t begin, std::size_t end) {
            Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
            for (std::size_t m = begin; m < end; ++m) {
                const double* row = design.data.data() + m * p;
                for (std::size_t a = 0; a < p; ++a) {
                    for (std::size_t b = a; b < p; ++b) {
                        g(a, b) += row[a] * row[b];
                    }
                }
            }
            return g;
        },
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) -> Eigen::MatrixXd { return x + y; });
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            gram(a, b) = gram(b, a);
        }
    }
    qr_.setThreshold(1e-10);
    qr_.compute(gram);
    rank_ = static_cast<std::size_t>(qr_.rank());
}

std::vector<double> Projector::project(std::span<const double> target) const {
    const std::size_t rows = design_->rows;
    const std::size_t p = design_->cols;
    if (target.size() != rows) {
        throw InvalidArgument("Projector::project: target size mismatch");
    }
    if (rows == 0 || is_constant(target)) {
        return std::vector<double>(rows, rows ? target[0] : 0.0);
    }
    if (!full_rank()) {
        throw NumericalFailure("Projector::project: rank-deficient design");
    }
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);
    const Eigen::VectorXd rhs = block_reduce(
        rows, workers_, zero,
        [&](std::size_t begin, std::size_t end) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
            for (std::size_t m = begin; m < end; ++m) {
                const double* row = design_->data.data() + m * p;
                for (std::size_t a = 0; a < p; ++a) {
                    v(a) += row[a] * target[m];
                }
            }
            return v;
        },
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> Eigen::VectorXd { return x + y; });
    const Eigen::VectorXd beta = qr_.solve(rhs);
    std::vector<double> fitted(rows);
    parallel_for(rows, workers_, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            const double* row = design_->data.data() + m * p;
            double s = 0.0;
            for (std::size_t a = 0; a < p; ++a) {
                s += row[a] * beta(a);
            }
            fitted[m] = s;
        }
    });
    return fitted;
}

}  // namespace bsdelab
