#include "sdelab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "sdelab/errors.hpp"

namespace sdelab {

VIntegrabilityReport estimate_v_integrability(const PathEnsemble& ensemble,
                                              const std::string& v_trace,
                                              const VIntegrabilityParams& params) {
    const StepTrace* trace = ensemble.trace(v_trace);
    if (!trace || trace->sum.empty())
        throw estimation_error("V-integrability needs a mean-type trace named '" + v_trace + "'");

    VIntegrabilityReport report;
    report.divergence_fraction = ensemble.divergence_fraction();
    report.bound = std::exp((params.rho + params.rho_tilde) * params.T) * (1.0 + params.ev0);

    for (long k = 0; k <= ensemble.n_steps; ++k) {
        const long alive = ensemble.alive[k];
        if (alive == 0) continue;
        const double mean = trace->mean_at(k, alive);
        if (mean > report.max_mean_v) {
            report.max_mean_v = mean;
            report.argmax_step = k;
            report.se_at_max = trace->se_at(k, alive);
        }
    }
    report.pass = ensemble.n_diverged == 0 &&
                  report.max_mean_v <= report.bound + 3.0 * report.se_at_max;
    return report;
}

namespace {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r_squared = 1.0;
};

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    if (n > 2) fit.slope_se = std::sqrt(ss_res / (n - 2) / sxx);
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

} // namespace

RateFit fit_exponential_rate(const std::vector<double>& times,
                             const std::vector<double>& mean_values,
                             double window_t0, double window_t1) {
    if (times.size() != mean_values.size())
        throw estimation_error("rate fit: times and values disagree in length");

    std::vector<double> xs, ys;
    bool shortened = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_t0 || times[i] > window_t1) continue;
        if (!(mean_values[i] > 0.0)) {
            // trace hit zero (or below); usable points end here
            shortened = true;
            break;
        }
        xs.push_back(times[i]);
        ys.push_back(std::log(mean_values[i]));
    }
    if (xs.size() < 4)
        throw estimation_error("rate fit: fewer than 4 usable points in the window");

    const LinearFit fit = least_squares(xs, ys);
    RateFit out;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.half_width = 1.96 * fit.slope_se;
    out.r_squared = fit.r_squared;
    out.n_points = static_cast<long>(xs.size());
    out.window_t0 = xs.front();
    out.window_t1 = xs.back();
    out.window_shortened = shortened;
    out.decays = out.slope + out.half_width < 0.0;
    return out;
}

RateFit fit_exponential_rate(const PathEnsemble& ensemble, const std::string& trace,
                             double window_t0, double window_t1) {
    const StepTrace* t = ensemble.trace(trace);
    if (!t || t->sum.empty())
        throw estimation_error("rate fit needs a mean-type trace named '" + trace + "'");
    std::vector<double> times, means;
    for (long k = 0; k <= ensemble.n_steps; ++k) {
        if (ensemble.alive[k] == 0) break;
        times.push_back(ensemble.time_at(k));
        means.push_back(t->mean_at(k, ensemble.alive[k]));
    }
    return fit_exponential_rate(times, means, window_t0, window_t1);
}

AsStabilityReport detect_as_stability(const PathEnsemble& ensemble, double epsilon,
                                      double min_fraction) {
    AsStabilityReport report;
    report.epsilon = epsilon;
    report.min_fraction = min_fraction;
    report.n_paths = ensemble.n_paths;
    report.n_diverged = ensemble.n_diverged;

    long settled = 0, alive = 0;
    for (long p = 0; p < ensemble.n_paths; ++p) {
        if (ensemble.first_divergence[p] >= 0) continue;
        ++alive;
        if (norm(ensemble.terminal[p]) < epsilon) ++settled;
    }
    report.fraction = alive > 0 ? static_cast<double>(settled) / alive : 0.0;
    report.pass = ensemble.n_diverged == 0 && report.fraction >= min_fraction;
    return report;
}

StrongRateFit estimate_strong_rate(const StrongErrorResult& result) {
    std::vector<double> xs, ys;
    StrongRateFit out;
    for (const StrongErrorLevel& lvl : result.levels) {
        if (!(lvl.rms_error > 0.0)) {
            out.excluded_levels.push_back(lvl.h);
            continue;
        }
        xs.push_back(std::log(lvl.h));
        ys.push_back(std::log(lvl.rms_error));
    }
    if (xs.size() < 4)
        throw estimation_error("strong-rate fit: fewer than 4 levels with positive error");
    const LinearFit fit = least_squares(xs, ys);
    out.slope = fit.slope;
    out.half_width = 1.96 * fit.slope_se;
    out.n_used = static_cast<long>(xs.size());
    return out;
}

NonnegativityReport check_nonnegativity(const PathEnsemble& ensemble,
                                        std::optional<double> h_threshold) {
    NonnegativityReport report;
    report.negative_count = ensemble.total_negative_steps;
    report.first_violation_path = ensemble.first_negative_path;
    report.first_violation_step = ensemble.first_negative_step;
    report.pass = report.negative_count == 0;
    if (h_threshold) {
        report.h_threshold = *h_threshold;
        report.h_warning = ensemble.h > *h_threshold;
    }
    return report;
}

ComparisonReport run_comparison(const ComparisonConfig& config) {
    if (config.lower.dim_state != 1 || config.upper.dim_state != 1 ||
        config.lower.dim_noise != 1 || config.upper.dim_noise != 1)
        throw config_error("comparison runs are defined for scalar SDEs only");

    const TamedCoefficients lower =
        config.lower_tamed ? *config.lower_tamed : TamedCoefficients::identity(config.lower);
    const TamedCoefficients upper =
        config.upper_tamed ? *config.upper_tamed : TamedCoefficients::identity(config.upper);

    ComparisonReport report;
    report.n_paths = config.n_paths;
    report.h_threshold = solve_positivity_h(config.mu, config.alpha);
    report.h_admissible = config.h <= report.h_threshold;

    // Hypothesis sampling: tamed drift ordering and the Lipschitz certificate.
    {
        PathRng rng(config.hypothesis_seed);
        bool order_ok = true, lipschitz_ok = true;
        const double lip_cap = config.mu * std::pow(config.h, -config.alpha);
        const double lip_cap_sigma = config.mu * std::pow(config.h, -0.5 * config.alpha);
        for (int n = 0; n < config.n_hypothesis_samples; ++n) {
            const double x = (2.0 * rng.uniform() - 1.0) * config.hypothesis_radius;
            const double y = (2.0 * rng.uniform() - 1.0) * config.hypothesis_radius;
            const Vec vx{x}, vy{y};
            const double nu_h = lower.drift_at(0.0, vx, config.h)[0];
            const double la_x = upper.drift_at(0.0, vx, config.h)[0];
            const double la_y = upper.drift_at(0.0, vy, config.h)[0];
            if (nu_h > la_x + 1e-12 * std::fabs(la_x)) order_ok = false;
            const double gap = std::fabs(x - y);
            if (gap > 0.0) {
                if (std::fabs(la_x - la_y) > lip_cap * gap * (1.0 + 1e-12))
                    lipschitz_ok = false;
                const double s_x = upper.diffusion_at(0.0, vx, config.h)(0, 0);
                const double s_y = upper.diffusion_at(0.0, vy, config.h)(0, 0);
                if (std::fabs(s_x - s_y) > lip_cap_sigma * gap * (1.0 + 1e-12))
                    lipschitz_ok = false;
            }
        }
        report.drift_order_ok = order_ok;
        report.lipschitz_ok = lipschitz_ok || config.lipschitz_certified;
    }
    if (!report.drift_order_ok)
        report.failed_hypothesis = "nu^h <= lambda^h failed on samples";
    else if (!report.lipschitz_ok)
        report.failed_hypothesis = "tamed Lipschitz certificate |l^h(x)-l^h(y)| <= mu |x-y| h^{-alpha} failed";
    else if (!report.h_admissible)
        report.failed_hypothesis = "h exceeds the truncation threshold h^{1-a} + h^{(1-a)/2} A_h <= 1/mu";

    const long n_steps = static_cast<long>(std::floor(config.T / config.h));
    report.steps_per_path = n_steps;
    const double band = NoiseTruncation::a_h(config.h);
    const double sqrt_h = std::sqrt(config.h);

    struct ChunkAccum {
        long violations = 0;
        double max_violation = 0.0;
    };
    const long chunk = 256;
    const long n_chunks = (config.n_paths + chunk - 1) / chunk;
    std::vector<ChunkAccum> partial(n_chunks);

    std::atomic<long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long c = next.fetch_add(1);
            if (c >= n_chunks) break;
            const long begin = c * chunk;
            const long end = std::min(begin + chunk, config.n_paths);
            ChunkAccum& acc = partial[c];
            for (long path = begin; path < end; ++path) {
                PathRng rng(config.rng, static_cast<std::uint64_t>(path));
                double x = config.x0_lower;
                double y = config.x0_upper;
                for (long k = 0; k < n_steps; ++k) {
                    const double zeta = std::clamp(rng.normal(), -band, band);
                    const double t = k * config.h;
                    const Vec vx{x}, vy{y};
                    // shared zeta: the coupled schemes see the same draw
                    x = x + lower.drift_at(t, vx, config.h)[0] * config.h +
                        lower.diffusion_at(t, vx, config.h)(0, 0) * sqrt_h * zeta;
                    y = y + upper.drift_at(t, vy, config.h)[0] * config.h +
                        upper.diffusion_at(t, vy, config.h)(0, 0) * sqrt_h * zeta;
                    if (x > y) {
                        ++acc.violations;
                        acc.max_violation = std::max(acc.max_violation, x - y);
                    }
                }
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(resolve_workers(config.workers),
                                                    static_cast<int>(n_chunks)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (const ChunkAccum& acc : partial) {
        report.violation_count += acc.violations;
        report.max_violation = std::max(report.max_violation, acc.max_violation);
    }
    report.pass = report.failed_hypothesis.empty() && report.violation_count == 0;
    return report;
}

} // namespace sdelab
