#include "sdelab/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "sdelab/errors.hpp"

namespace sdelab {

Vec sample_in_ball(PathRng& rng, int dim, double radius) {
    Vec x(dim);
    for (;;) {
        double sq = 0.0;
        for (int i = 0; i < dim; ++i) {
            x[i] = (2.0 * rng.uniform() - 1.0);
            sq += x[i] * x[i];
        }
        if (sq <= 1.0) break;
    }
    for (double& v : x) v *= radius;
    return x;
}

namespace {

double fd_gradient_deviation(const LyapunovSpec& lyap, const Vec& x) {
    const Vec grad = lyap.gradient(x);
    if (!all_finite(grad)) throw domain_violation("gradient non-finite", x);
    double worst = 0.0;
    Vec xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = 6e-6 * (1.0 + std::fabs(x[i]));
        xp[i] = x[i] + step;
        xm[i] = x[i] - step;
        const double fd = (lyap.value(xp) - lyap.value(xm)) / (2.0 * step);
        xp[i] = x[i];
        xm[i] = x[i];
        worst = std::max(worst, std::fabs(fd - grad[i]) / (1.0 + std::fabs(grad[i])));
    }
    return worst;
}

double fd_hessian_deviation(const LyapunovSpec& lyap, const Vec& x) {
    const Mat hess = lyap.hessian(x);
    if (!all_finite(hess)) throw domain_violation("hessian non-finite", x);
    double worst = 0.0;
    const std::size_t d = x.size();
    Vec y = x;
    for (std::size_t i = 0; i < d; ++i) {
        const double hi = 1.2e-4 * (1.0 + std::fabs(x[i]));
        for (std::size_t j = i; j < d; ++j) {
            double fd;
            if (i == j) {
                y[i] = x[i] + hi;
                const double fp = lyap.value(y);
                y[i] = x[i] - hi;
                const double fm = lyap.value(y);
                y[i] = x[i];
                fd = (fp - 2.0 * lyap.value(x) + fm) / (hi * hi);
            } else {
                const double hj = 1.2e-4 * (1.0 + std::fabs(x[j]));
                y[i] = x[i] + hi; y[j] = x[j] + hj;
                const double fpp = lyap.value(y);
                y[j] = x[j] - hj;
                const double fpm = lyap.value(y);
                y[i] = x[i] - hi;
                const double fmm = lyap.value(y);
                y[j] = x[j] + hj;
                const double fmp = lyap.value(y);
                y[i] = x[i]; y[j] = x[j];
                fd = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            }
            const double exact = hess(i, j);
            worst = std::max(worst, std::fabs(fd - exact) / (1.0 + std::fabs(exact)));
        }
    }
    return worst;
}

} // namespace

FiniteDifferenceReport finite_difference_check(const LyapunovSpec& lyap,
                                               const std::vector<Vec>& sample_points,
                                               double tolerance) {
    FiniteDifferenceReport report;
    report.tolerance = tolerance;
    for (const Vec& x : sample_points) {
        FiniteDifferenceReport::Point p;
        p.x = x;
        p.gradient_deviation = fd_gradient_deviation(lyap, x);
        p.hessian_deviation = fd_hessian_deviation(lyap, x);
        report.max_gradient_deviation = std::max(report.max_gradient_deviation, p.gradient_deviation);
        report.max_hessian_deviation = std::max(report.max_hessian_deviation, p.hessian_deviation);
        report.points.push_back(std::move(p));
    }
    report.pass = report.max_gradient_deviation <= tolerance &&
                  report.max_hessian_deviation <= tolerance;
    return report;
}

namespace {

// ||V^(s)||_HS at x for s = 1, 2 from the analytic derivatives, s >= 3 from
// the supplied norm function (or -1 when unavailable).
double derivative_hs_norm(const LyapunovSpec& lyap, const Vec& x, int s) {
    if (s == 1) return norm(lyap.gradient(x));
    if (s == 2) return frobenius_norm(lyap.hessian(x));
    if (lyap.higher_derivative_hs_norm) return lyap.higher_derivative_hs_norm(x, s);
    return -1.0;
}

} // namespace

double estimate_lyapunov_c(const LyapunovSpec& lyap, int dim, double radius,
                           int n_samples, std::uint64_t seed) {
    PathRng rng(seed);
    double best = 0.0;
    for (int n = 0; n < n_samples; ++n) {
        const Vec x = sample_in_ball(rng, dim, radius);
        const double v = lyap.value(x);
        for (int s = 1; s <= lyap.p; ++s) {
            const double hs = derivative_hs_norm(lyap, x, s);
            if (hs < 0.0) continue;
            const double denom = std::pow(1.0 + v, 1.0 - s * lyap.gamma);
            best = std::max(best, hs / denom);
        }
    }
    return best;
}

ClassCheckReport verify_lyapunov_class(const LyapunovSpec& lyap, int dim, double radius,
                                       int n_samples, std::uint64_t seed) {
    ClassCheckReport report;
    PathRng rng(seed);
    bool checked[32] = {};
    for (int n = 0; n < n_samples; ++n) {
        const Vec x = sample_in_ball(rng, dim, radius);
        const double v = lyap.value(x);
        const int s_max = std::min(lyap.p, 31);
        for (int s = 1; s <= s_max; ++s) {
            const double hs = derivative_hs_norm(lyap, x, s);
            if (hs < 0.0) continue;
            checked[s] = true;
            const double bound = lyap.c * std::pow(1.0 + v, 1.0 - s * lyap.gamma);
            const double ratio = bound > 0.0 ? hs / bound : (hs > 0.0 ? HUGE_VAL : 0.0);
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.worst_x = x;
                report.worst_order = s;
            }
        }
    }
    for (int s = 1; s < 32; ++s)
        if (checked[s]) report.orders_checked.push_back(s);
    report.pass = report.max_ratio <= 1.0 + 1e-9;
    return report;
}

} // namespace sdelab
