#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdelab/linalg.hpp"
#include "sdelab/rng.hpp"

namespace sdelab {

// A Lyapunov function V >= 0 with analytic derivatives up to order p and the
// derivative bound ||V^(s)||_HS <= c (1+V)^{1-s*gamma} for s <= p.
//
// Subclasses:
//   general - plain member of the class,
//   hat     - V^(p+1) == 0 (polynomials of degree <= p),
//   bar     - |.|^p-like: additionally ||V^(s)||_HS <= c V^{1-s/p}.
struct LyapunovSpec {
    enum class Subclass { general, hat, bar };

    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
    // HS norm of the s-th derivative tensor for 3 <= s <= p; leave empty when
    // p <= 2 or the norms are not available (checks at s >= 3 are then skipped).
    std::function<double(const Vec&, int)> higher_derivative_hs_norm;

    int p = 2;
    double gamma = 0.5;       // in (0, 1/p]
    double c = 2.0;           // derivative-bound constant of the class
    Subclass subclass = Subclass::general;
    std::function<double(const Vec&)> dominating_u; // optional, V <= U
    bool monotone_radial = false;                   // V(x) <= V(y) when |x| <= |y|
    std::string name = "custom";

    double u_at(const Vec& x) const { return dominating_u ? dominating_u(x) : value(x); }
};

// Per-point result of the finite-difference oracle check.
struct FiniteDifferenceReport {
    struct Point {
        Vec x;
        double gradient_deviation = 0.0; // max_i |an - fd| / (1 + |an|)
        double hessian_deviation = 0.0;  // max_ij, same scaling
    };
    std::vector<Point> points;
    double max_gradient_deviation = 0.0;
    double max_hessian_deviation = 0.0;
    double tolerance = 1e-5;
    bool pass = false;
};

// Compares analytic gradient/Hessian against central finite differences of
// value at the given points. Deviations are relative, scaled by 1+|exact|.
FiniteDifferenceReport finite_difference_check(const LyapunovSpec& lyap,
                                               const std::vector<Vec>& sample_points,
                                               double tolerance = 1e-5);

// Candidate for the class constant c: maximizes ||V^(s)||_HS / (1+V)^{1-s*gamma}
// over n uniform samples in the ball of radius R (s = 1, 2, and >= 3 when the
// higher-derivative norms are supplied).
double estimate_lyapunov_c(const LyapunovSpec& lyap, int dim, double radius = 10.0,
                           int n_samples = 10000, std::uint64_t seed = 0x5DE1ABULL);

// Sampled verification of the class membership bound with the stored c.
// Returns the max ratio ||V^(s)||_HS / (c (1+V)^{1-s*gamma}); <= 1 means pass.
// Orders s >= 3 are covered only when higher_derivative_hs_norm is present;
// `orders_checked` records which s were exercised.
struct ClassCheckReport {
    double max_ratio = 0.0;
    Vec worst_x;
    int worst_order = 0;
    std::vector<int> orders_checked;
    bool pass = false;
};
ClassCheckReport verify_lyapunov_class(const LyapunovSpec& lyap, int dim,
                                       double radius = 10.0, int n_samples = 10000,
                                       std::uint64_t seed = 0x5DE1ABULL);

// Uniform sample in the closed ball of radius R (rejection from the cube).
Vec sample_in_ball(PathRng& rng, int dim, double radius);

} // namespace sdelab
