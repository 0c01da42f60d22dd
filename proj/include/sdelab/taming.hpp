#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sdelab/lyapunov.hpp"
#include "sdelab/model.hpp"
#include "sdelab/schemes.hpp"
#include "sdelab/tamed.hpp"

namespace sdelab {

// What a taming/projection derivation is for; selects which rule binds.
enum class Purpose {
    integrability,
    l2_rate,
    as_stability,
    v_exp_stability,
    positivity,
    comparison,
};

std::string to_string(Purpose p);

// Resolved taming decisions for one experiment. beta1/beta2 are the h-exponents
// of the coefficient bounds |b^h| h^{beta1} v ||sigma^h|| h^{beta2} <= mu (1+V)^gamma;
// the hat-subclass route fixes (1/2, 1/4), the general class needs
// beta2 <= 1/2 - 1/(p^4).
struct TamingPlan {
    Purpose purpose = Purpose::integrability;
    double beta1 = 0.5;
    double beta2 = 0.25;
    double C = 1.0;
    double kappa_star = 1.0;
    double mu = 1.0;
    double r = 0.0;      // projection exponent, when projected
    double h_max = 1.0;
    double alpha = 0.25; // h-exponent of the common-G balanced forms

    void validate(const LyapunovSpec& lyap) const; // throws config_error
};

// ---- taming constructions ----

// Case-(i) balanced taming from the integrability construction:
//   G_sigma = C V^{kappa* gamma} h^{beta2},  G_b = 2 G_sigma + G_sigma^2,
// so (1 + G_b) = (1 + G_sigma)^2 identically. Requires kappa* >= kappa - 1 and
// C >= (K/mu) v 1. kappa_star defaults to kappa - 1.
TamedCoefficients build_balanced_taming(const SdeModel& model, const LyapunovSpec& lyap,
                                        double mu, double beta2,
                                        std::optional<double> kappa_star = std::nullopt,
                                        std::optional<double> C = std::nullopt);

// Common-G balanced taming for almost-sure stability:
//   G(x) = C (U^{(kappa1-1)gamma} v U^{(kappa2-1)gamma}),  G_b = G_sigma = G h^alpha.
// Guards (for alpha = 1/4): h < (mu lambda / K)^4 and C >= 1/(mu/K - h^{1/4}/lambda).
struct StabilityTamingParams {
    std::function<double(const Vec&)> U; // defaults to lyap's dominating U
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double gamma = 0.5;
    double C = 1.0;
    double alpha = 0.25;
};
TamedCoefficients build_stability_taming(const SdeModel& model, const StabilityTamingParams& params);

// Common-G balanced taming with a plain power G(x) = C |x|^exponent (the
// worked cubic choice is C = 2, exponent = 2, alpha = 1).
TamedCoefficients build_power_taming(const SdeModel& model, double C, double exponent,
                                     double alpha);

// ---- derived constants ----

struct ProjectionExponent {
    double r = 0.0;        // recommended value (bound scaled by slack)
    double bound = 0.0;    // the binding inequality's right-hand side
    double slack = 0.9;    // 1.0 when the bound itself is admissible (<=)
    bool unconstrained = false; // kappa == 1: globally Lipschitz growth
};

// Binding projection exponent for the declared purpose:
//   integrability:   r <= beta2 / ((kappa-1) q gamma)        (closed, slack 1)
//   l2_rate:         r <  1 / (2 (kappa-1))                  (strict, slack 0.9)
//   v_exp_stability: r <  1 / (4 (kappa_check-1) q gamma)    (strict, slack 0.9)
ProjectionExponent derive_projection_exponent(Purpose purpose, const LyapunovSpec& lyap,
                                              const GrowthProfile& growth,
                                              double beta2 = 0.25, double slack = 0.9);

enum class RhoTildeMode { remark, exact_sum };

// The integrability remainder constant rho_tilde(mu):
//   remark:    c (p-1) d^{p-1} mu^2            (requires mu <= 1)
//   exact_sum: c mu^2/2 + c sum_{s=3}^p phi_s mu^s,  phi_s = d^{s-1}/(floor(s/2)!)^2
double compute_rho_tilde(double c, int p, int d, double mu, RhoTildeMode mode);

// Strict upper bound on mu for stability:
//   a.s. (rho absent):  1 / sqrt(c/2 + c d^{p-1}(p-2))
//   V-exponential:      sqrt(rho) / sqrt(c/2 + c d^{p-1}(p-2))
double compute_mu_threshold(double c, int p, int d, std::optional<double> rho = std::nullopt);

// Purpose-specific step-size ceilings. Returns the largest admissible h in
// (0,1]; 0 when no admissible h exists.
struct HThresholdParams {
    double mu = 1.0;
    double lambda = 1.0;      // lower-bound constant of z (as_stability)
    double K = 1.0;
    double nu = 1.0;
    double gamma = 0.5;
    double kappa_check = 1.0; // kappa1 v kappa2
    double q = 1.0;
    double r = 0.0;
    double alpha = 0.5;       // noise-truncation taming exponent (< 1)
};
double derive_h_threshold(Purpose purpose, const HThresholdParams& params);

// Largest h0 such that f(h) = h^{1-alpha} + h^{(1-alpha)/2} sqrt(2|log h|)
// stays <= 1/mu on (0, h0]; f increases through its first crossing, found by
// geometric scan plus bisection to relative 1e-10. Returns 1 when the
// constraint is vacuous on all of (0,1).
double solve_positivity_h(double mu, double alpha);

// ---- sampled hypothesis checks ----

// Default sampling: n_samples uniform in the ball of radius `radius` plus
// n_origin points within origin_radius of 0 (the conditions are most delicate
// near the origin and near the ball boundary).
struct SampleSpec {
    double radius = 10.0;
    int n_samples = 10000;
    int n_origin = 100;
    double origin_radius = 1e-3;
    std::uint64_t seed = 0x7A31A6ULL;
    double t = 0.0; // evaluation time for non-homogeneous coefficients
};

struct ViolationReport {
    double max_ratio = 0.0;   // worst LHS/RHS (taming conditions)
    double max_margin = 0.0;  // worst (LV - RHS)/(1+|RHS|) (drift conditions)
    Vec worst_x;
    bool pass = false;        // ratio <= 1 + 1e-9 resp. margin <= 1e-9, no hard violation
    bool hard_violation = false; // RHS = 0 while LHS > 0 at some sample
    int n_samples = 0;
    std::string note;
};

enum class TamingCondition {
    integrability,   // |b^h| h^{b1} v ||s^h|| h^{b2} <= mu (1+V)^gamma
    stability,       // ... <= mu (1+U)^gamma z^h / (1+U+z^h)
    v_exponential,   // ... <= mu V^gamma
    bar_simplified,  // ... <= mu U^gamma z^h / (U+z^h)
    combo,           // ||V^(i+2j)|| |b^h|^i ||s^h||^{2j} h^{(i+j)/2} <= mu z^h
};

std::string to_string(TamingCondition c);

// Checks the selected coefficient condition by sampling. Pass the model for
// untamed schemes (projected schemes check the raw coefficients on the
// projection ball; cap SampleSpec::radius at h^{-r} accordingly). z is the
// continuous drift-decay function; for tamed coefficients the checker uses
// z^h(x) = z(x) / (1 + g_b(x,h)), for plain models z^h = z.
// `combo` needs higher_derivative_hs_norm for p > 2; without it the checker
// falls back to bar_simplified and says so in the note.
ViolationReport check_taming_conditions(const TamedCoefficients& coeffs,
                                        const LyapunovSpec& lyap,
                                        TamingCondition condition, double mu, double h,
                                        const SampleSpec& spec,
                                        std::function<double(const Vec&)> z = nullptr,
                                        double beta1 = 0.5, double beta2 = 0.25);

ViolationReport check_taming_conditions(const SdeModel& model, const LyapunovSpec& lyap,
                                        TamingCondition condition, double mu, double h,
                                        const SampleSpec& spec,
                                        std::function<double(const Vec&)> z = nullptr,
                                        double beta1 = 0.5, double beta2 = 0.25);

enum class DriftForm {
    le_rho_one_plus_v, // L V <= rho (1 + V)
    le_minus_z,        // L V <= -z
    le_minus_rho_v,    // L V <= -rho V
};

std::string to_string(DriftForm f);

// Sampled check of the Lyapunov drift condition for L (plain model) or L^h
// (tamed coefficients at step size h).
ViolationReport check_lyapunov_drift(const SdeModel& model, const LyapunovSpec& lyap,
                                     DriftForm form, double rho,
                                     std::function<double(const Vec&)> z,
                                     const SampleSpec& spec);

ViolationReport check_lyapunov_drift(const TamedCoefficients& coeffs, const LyapunovSpec& lyap,
                                     double h, DriftForm form, double rho,
                                     std::function<double(const Vec&)> z,
                                     const SampleSpec& spec);

// z-growth sanity: z(x) >= lambda (1+U(x))^{1-gamma} (U^{kappa1 gamma} v U^{kappa2 gamma}).
// lambda is user-supplied; the check verifies, never infers.
ViolationReport check_z_growth(std::function<double(const Vec&)> z,
                               std::function<double(const Vec&)> U,
                               double kappa1, double kappa2, double gamma, double lambda,
                               int dim, const SampleSpec& spec);

// Measures the best mu certified by the samples: the max over the ball of
// (|b^h| h^{beta1} v ||s^h|| h^{beta2}) / (1+V)^gamma. Used to feed
// compute_rho_tilde when mu is derived rather than configured.
double measure_integrability_mu(const TamedCoefficients& coeffs, const LyapunovSpec& lyap,
                                double h, const SampleSpec& spec,
                                double beta1 = 0.5, double beta2 = 0.25);
double measure_integrability_mu(const SdeModel& model, const LyapunovSpec& lyap,
                                double h, const SampleSpec& spec,
                                double beta1 = 0.5, double beta2 = 0.25);

} // namespace sdelab
