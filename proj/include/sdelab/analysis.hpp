#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdelab/montecarlo.hpp"
#include "sdelab/taming.hpp"

namespace sdelab {

// ---- V-integrability ----

struct VIntegrabilityParams {
    double rho = 0.0;       // drift constant of L^h V <= rho (1+V)
    double rho_tilde = 0.0; // remainder constant
    double T = 1.0;
    double ev0 = 0.0;       // E V(X_0)
};

struct VIntegrabilityReport {
    double max_mean_v = 0.0;
    long argmax_step = 0;
    double se_at_max = 0.0;
    double bound = 0.0;          // e^{(rho+rho_tilde) T} (1 + E V(X_0))
    double divergence_fraction = 0.0;
    bool pass = false;           // max <= bound + 3 SE and no diverged paths
};

VIntegrabilityReport estimate_v_integrability(const PathEnsemble& ensemble,
                                              const std::string& v_trace,
                                              const VIntegrabilityParams& params);

// ---- exponential-rate fit ----

struct RateFit {
    double slope = 0.0;
    double half_width = 0.0; // 95% normal-approximation half width
    double intercept = 0.0;
    double r_squared = 0.0;
    long n_points = 0;
    double window_t0 = 0.0;
    double window_t1 = 0.0;
    bool window_shortened = false; // non-positive means forced a shorter window
    bool decays = false;           // slope + half_width < 0
};

// Least-squares slope of log(mean trace) vs t over [t0, t1]. Throws
// estimation_error with fewer than 4 usable points.
RateFit fit_exponential_rate(const std::vector<double>& times,
                             const std::vector<double>& mean_values,
                             double window_t0, double window_t1);

RateFit fit_exponential_rate(const PathEnsemble& ensemble, const std::string& trace,
                             double window_t0, double window_t1);

// ---- almost-sure stability ----

struct AsStabilityReport {
    double fraction = 0.0; // non-diverged paths with |X_K| < epsilon
    long n_paths = 0;
    long n_diverged = 0;
    double epsilon = 1e-3;
    double min_fraction = 0.99;
    bool pass = false; // fraction >= min_fraction and zero diverged
};

AsStabilityReport detect_as_stability(const PathEnsemble& ensemble, double epsilon = 1e-3,
                                      double min_fraction = 0.99);

// ---- strong-rate fit ----

struct StrongRateFit {
    double slope = 0.0;
    double half_width = 0.0;
    long n_used = 0;
    std::vector<double> excluded_levels; // zero-error levels dropped from the fit
};

// Log-log regression of RMS error vs h. Needs >= 4 usable levels.
StrongRateFit estimate_strong_rate(const StrongErrorResult& result);

// ---- positivity ----

struct NonnegativityReport {
    long negative_count = 0;
    long first_violation_path = -1;
    long first_violation_step = -1;
    bool pass = false; // exactly zero negative iterates
    bool h_warning = false; // h above the positivity threshold; check still ran
    double h_threshold = 0.0;
};

// Counts negative iterates recorded by the ensemble (model must be 1-d with
// the negative_count functional active). h_threshold, when supplied, only
// attaches the hypothesis warning.
NonnegativityReport check_nonnegativity(const PathEnsemble& ensemble,
                                        std::optional<double> h_threshold = std::nullopt);

// ---- comparison ----

struct ComparisonConfig {
    SdeModel lower;  // drift nu
    SdeModel upper;  // drift lambda
    // Optional drift taming of both schemes; identity when absent. The shared
    // diffusion is tamed with the same divisor.
    std::optional<TamedCoefficients> lower_tamed;
    std::optional<TamedCoefficients> upper_tamed;
    double h = 0.01;
    double T = 10.0;
    long n_paths = 1000;
    RngSpec rng;
    double x0_lower = 1.0;
    double x0_upper = 1.0;
    double mu = 1.0;    // Lipschitz-in-the-tamed-sense constant certificate
    double alpha = 0.5; // h-exponent of the certificate
    bool lipschitz_certified = false; // caller asserts the certificate; sampling re-checks
    int workers = 0;
    // Hypothesis sampling
    int n_hypothesis_samples = 2000;
    double hypothesis_radius = 10.0;
    std::uint64_t hypothesis_seed = 0xC0517EULL;
};

struct ComparisonReport {
    long violation_count = 0;   // steps with X_k > Y_k, strict, zero tolerance
    double max_violation = 0.0; // largest positive X_k - Y_k observed
    long steps_per_path = 0;
    long n_paths = 0;
    bool drift_order_ok = false;    // nu^h <= lambda^h on samples
    bool lipschitz_ok = false;      // |l^h(x)-l^h(y)| <= mu |x-y| h^{-alpha} on sampled pairs
    bool h_admissible = false;      // h^{1-alpha} + h^{(1-alpha)/2} A_h <= 1/mu
    double h_threshold = 0.0;
    std::string failed_hypothesis;  // empty when all hold
    bool pass = false;              // hypotheses hold and zero violations
};

// Couples the two truncated-noise schemes on shared zeta draws and counts
// ordering violations exactly.
ComparisonReport run_comparison(const ComparisonConfig& config);

} // namespace sdelab
