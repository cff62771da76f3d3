#include "bsdelab/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bsdelab/error.hpp"
#include "bsdelab/philox.hpp"

namespace bsdelab {
namespace {

double euclidean_norm(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) {
        s += v * v;
    }
    return std::sqrt(s);
}

double component_sum(std::span<const double> z) {
    return std::accumulate(z.begin(), z.end(), 0.0);
}

Envelope constant_envelope(double c, std::string label) {
    return Envelope{[c](double) { return c; }, [c](double t) { return c * c * t; }, true,
                    std::move(label)};
}

Envelope unusable_envelope() {
    return Envelope{[](double) { return std::numeric_limits<double>::infinity(); }, {}, false,
                    "none (quadratic growth)"};
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw InvalidArgument(std::string("builtin_generator: non-finite ") + what);
    }
}

struct Builder {
    std::size_t dims;

    GeneratorSpec operator()(const drivers::Zero&) const {
        return GeneratorSpec{"zero",
                             dims,
                             [](double, double, std::span<const double>) { return 0.0; },
                             constant_envelope(0.0, "0"),
                             constant_envelope(0.0, "0"),
                             true,
                             true};
    }

    GeneratorSpec operator()(const drivers::LinearZ& k) const {
        require_finite(k.coef, "linear_z coefficient");
        const double coef = k.coef;
        const double lip = std::abs(coef) * std::sqrt(static_cast<double>(dims));
        return GeneratorSpec{"linear_z",
                             dims,
                             [coef](double, double, std::span<const double> z) {
                                 return coef * component_sum(z);
                             },
                             constant_envelope(0.0, "0"),
                             constant_envelope(lip, "|coef|*sqrt(d)"),
                             true,
                             true};
    }

    GeneratorSpec operator()(const drivers::TimeScaled& k) const {
        require_finite(k.v.scale, "time_scaled scale");
        Envelope v = make_envelope(k.v);
        auto vfun = v.value;
        return GeneratorSpec{"time_scaled",
                             dims,
                             [vfun](double t, double, std::span<const double> z) {
                                 return vfun(t) * euclidean_norm(z);
                             },
                             constant_envelope(0.0, "0"),
                             std::move(v),
                             true,
                             true};
    }

    GeneratorSpec operator()(const drivers::Quadratic&) const {
        return GeneratorSpec{"quadratic",
                             dims,
                             [](double, double, std::span<const double> z) {
                                 const double n = euclidean_norm(z);
                                 return -n * n;
                             },
                             unusable_envelope(),
                             unusable_envelope(),
                             false,
                             true};
    }

    GeneratorSpec operator()(const drivers::BrokenH2&) const {
        return GeneratorSpec{"broken_h2",
                             dims,
                             [](double, double, std::span<const double> z) {
                                 return component_sum(z) + 1.0;
                             },
                             constant_envelope(0.0, "0"),
                             constant_envelope(std::sqrt(static_cast<double>(dims)), "sqrt(d)"),
                             true,
                             true};
    }
};

double trapezoid(const std::function<double(double)>& f, std::span<const double> nodes,
                 std::size_t sub) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i];
        const double h = (nodes[i + 1] - a) / static_cast<double>(sub);
        double s = 0.5 * (f(a) + f(nodes[i + 1]));
        for (std::size_t k = 1; k < sub; ++k) {
            s += f(a + h * static_cast<double>(k));
        }
        total += s * h;
    }
    return total;
}

}  // namespace

Envelope make_envelope(VShape shape) {
    const double c = shape.scale;
    if (!(c >= 0.0)) {
        throw InvalidArgument("envelope scale must be nonnegative");
    }
    switch (shape.profile) {
        case VProfile::constant:
            return constant_envelope(c, "constant");
        case VProfile::linear:
            return Envelope{[c](double t) { return c * t; },
                            [c](double t) { return c * c * t * t * t / 3.0; }, true, "linear"};
        case VProfile::sine:
            return Envelope{[c](double t) { return c * std::abs(std::sin(t)); },
                            [c](double t) { return c * c * (t / 2.0 - std::sin(2.0 * t) / 4.0); },
                            true, "sine"};
    }
    throw InvalidArgument("unknown envelope profile");
}

GeneratorSpec builtin_generator(const GeneratorKind& kind, std::size_t dims) {
    if (dims == 0) {
        throw InvalidArgument("builtin_generator: dims must be at least 1");
    }
    return std::visit(Builder{dims}, kind);
}

std::vector<DriverSample> sample_points(std::size_t dims, const SampleBox& box, std::size_t count,
                                        std::uint64_t seed) {
    std::vector<DriverSample> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        CounterStream s(seed, k);
        out[k].t = box.horizon * s.next_uniform();
        out[k].y = box.y_radius * (2.0 * s.next_uniform() - 1.0);
        out[k].z.resize(dims);
        for (auto& zj : out[k].z) {
            zj = box.z_radius * (2.0 * s.next_uniform() - 1.0);
        }
    }
    return out;
}

CheckReport check_h2(const GeneratorSpec& g, std::span<const double> y_samples,
                     std::span<const double> t_samples) {
    if (y_samples.empty() || t_samples.empty()) {
        throw InvalidArgument("check_h2: samples must be nonempty");
    }
    const std::vector<double> zero(g.dims, 0.0);
    double worst = 0.0;
    for (double t : t_samples) {
        for (double y : y_samples) {
            worst = std::max(worst, std::abs(g(t, y, zero)));
        }
    }
    return CheckReport{"h2", g.name, worst, kAssumptionTolerance, worst < kAssumptionTolerance,
                       y_samples.size() * t_samples.size()};
}

CheckReport check_remark_bound(const GeneratorSpec& g, std::span<const DriverSample> samples) {
    if (!g.lipschitz_class()) {
        throw ContractViolation("check_remark_bound: generator '" + g.name +
                                "' does not claim (H1) and (H2)");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const double excess = std::abs(g(s.t, s.y, s.z)) - g.v_env(s.t) * euclidean_norm(s.z);
        worst = std::max(worst, excess);
    }
    return CheckReport{"remark_bound", g.name, worst, kAssumptionTolerance,
                       worst <= kAssumptionTolerance, samples.size()};
}

CheckReport check_lipschitz(const GeneratorSpec& g, const SampleBox& box, std::size_t pairs,
                            std::uint64_t seed) {
    if (!g.claims_h1) {
        throw ContractViolation("check_lipschitz: generator '" + g.name + "' does not claim (H1)");
    }
    const auto a = sample_points(g.dims, box, pairs, seed);
    const auto b = sample_points(g.dims, box, pairs, seed ^ 0x5bd1e995u);
    double worst = 0.0;
    std::vector<double> dz(g.dims);
    for (std::size_t k = 0; k < pairs; ++k) {
        const double t = a[k].t;
        for (std::size_t j = 0; j < g.dims; ++j) {
            dz[j] = a[k].z[j] - b[k].z[j];
        }
        const double bound =
            g.u_env(t) * std::abs(a[k].y - b[k].y) + g.v_env(t) * euclidean_norm(dz);
        const double ga = g(t, a[k].y, a[k].z);
        const double gb = g(t, b[k].y, b[k].z);
        // g is a black box, so its two values carry rounding error of their own;
        // without this allowance near-coincident pairs cancel into spurious ratios > 1.
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(ga) + std::abs(gb));
        const double diff = std::max(0.0, std::abs(ga - gb) - slack);
        if (bound > 0.0) {
            worst = std::max(worst, diff / bound);
        } else if (diff > 0.0) {
            worst = std::numeric_limits<double>::infinity();
        }
    }
    return CheckReport{"lipschitz", g.name, worst, kAssumptionTolerance,
                       worst <= 1.0 + kAssumptionTolerance, pairs};
}

GeneratorEnergy energy_mu(const GeneratorSpec& g, const TimeGrid& grid) {
    if (!g.v_env.usable) {
        throw ContractViolation("energy_mu: generator '" + g.name + "' has no usable v envelope");
    }
    const double horizon = grid.horizon();
    if (g.v_env.square_antiderivative) {
        const auto& F = g.v_env.square_antiderivative;
        const double mu = F(horizon) - F(0.0);
        if (!std::isfinite(mu)) {
            throw NumericalFailure("energy_mu: non-finite closed form");
        }
        return GeneratorEnergy{mu, 0.0, true};
    }
    const auto square = [&](double t) {
        const double v = g.v_env(t);
        return v * v;
    };
    constexpr std::size_t kMinPanels = 1000;
    constexpr std::size_t kMaxPanels = std::size_t{1} << 24;
    std::size_t sub = (kMinPanels + grid.steps() - 1) / grid.steps();
    double coarse = trapezoid(square, grid.nodes(), sub);
    for (;;) {
        sub *= 2;
        const double fine = trapezoid(square, grid.nodes(), sub);
        if (!std::isfinite(fine)) {
            throw NumericalFailure("energy_mu: non-finite quadrature value");
        }
        // Richardson estimate of the error of the finer rule.
        const double err = std::abs(fine - coarse) / 3.0;
        if (err <= 1e-13 * std::max(1.0, std::abs(fine)) || sub * grid.steps() >= kMaxPanels) {
            return GeneratorEnergy{fine, err, false};
        }
        coarse = fine;
    }
}

}  // namespace bsdelab
