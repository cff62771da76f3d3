#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bsdelab/time_grid.hpp"

namespace bsdelab {

using DriverFn = std::function<double(double t, double y, std::span<const double> z)>;

// Deterministic modulus t -> u(t) or v(t) from the generalized Lipschitz bound.
struct Envelope {
    std::function<double(double)> value;
    // Antiderivative of value(t)^2, when known in closed form.
    std::function<double(double)> square_antiderivative;
    // False when the driver has no such modulus (quadratic growth).
    bool usable = true;
    std::string label;

    double operator()(double t) const { return value(t); }
};

/**
 * A BSDE driver g(t, y, z) together with its declared envelopes.
 *
 * Envelopes and assumption flags are declarations, not inferred; the
 * check_* functions below test them on sampled points.
 */
struct GeneratorSpec {
    std::string name;
    std::size_t dims = 1;
    DriverFn eval;
    Envelope u_env;
    Envelope v_env;
    bool claims_h1 = false;
    bool claims_h2 = false;

    double operator()(double t, double y, std::span<const double> z) const { return eval(t, y, z); }
    bool lipschitz_class() const noexcept { return claims_h1 && claims_h2; }
};

enum class VProfile { constant, linear, sine };

// v(t) = scale, scale*t, or scale*|sin t|.
struct VShape {
    VProfile profile = VProfile::constant;
    double scale = 1.0;
};

Envelope make_envelope(VShape shape);

namespace drivers {
struct Zero {};
// g = coef * (z_1 + ... + z_d)
struct LinearZ {
    double coef = 0.0;
};
// g = v(t) |z|
struct TimeScaled {
    VShape v;
};
// g = -|z|^2, no generalized Lipschitz envelope.
struct Quadratic {};
// g = z_1 + ... + z_d + 1 while claiming (H1)-(H2); a deliberately broken
// registration used to exercise the verifier.
struct BrokenH2 {};
}  // namespace drivers

using GeneratorKind = std::variant<drivers::Zero, drivers::LinearZ, drivers::TimeScaled,
                                   drivers::Quadratic, drivers::BrokenH2>;

GeneratorSpec builtin_generator(const GeneratorKind& kind, std::size_t dims = 1);

struct CheckReport {
    std::string check;
    std::string generator;
    double statistic = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::size_t samples = 0;
};

inline constexpr double kAssumptionTolerance = 1e-12;

struct DriverSample {
    double t = 0.0;
    double y = 0.0;
    std::vector<double> z;
};

// Sampling box for randomized assumption checks.
struct SampleBox {
    double horizon = 1.0;
    double y_radius = 10.0;
    double z_radius = 10.0;
};

std::vector<DriverSample> sample_points(std::size_t dims, const SampleBox& box, std::size_t count,
                                        std::uint64_t seed);

// max |g(t, y, 0)| over the grid of samples; passes iff below 1e-12.
CheckReport check_h2(const GeneratorSpec& g, std::span<const double> y_samples,
                     std::span<const double> t_samples);

// max of |g(t,y,z)| - v(t)|z|. Requires claims_h1 && claims_h2.
CheckReport check_remark_bound(const GeneratorSpec& g, std::span<const DriverSample> samples);

// max of |g(t,y,z) - g(t,y',z')| / (u(t)|y-y'| + v(t)|z-z'|) over random
// pairs sharing t. Requires claims_h1. Passes iff <= 1 + 1e-12.
// The difference is reduced by a few ulps of the g values to absorb evaluation rounding.
CheckReport check_lipschitz(const GeneratorSpec& g, const SampleBox& box, std::size_t pairs,
                            std::uint64_t seed);

struct GeneratorEnergy {
    double mu = 0.0;
    double error_bound = 0.0;
    bool exact = false;
};

// mu = integral of v(s)^2 over [0, T].
GeneratorEnergy energy_mu(const GeneratorSpec& g, const TimeGrid& grid);

}  // namespace bsdelab
