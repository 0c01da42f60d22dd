#include "sdelab/taming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sdelab {

std::string to_string(Purpose p) {
    switch (p) {
        case Purpose::integrability: return "integrability";
        case Purpose::l2_rate: return "l2-rate";
        case Purpose::as_stability: return "as-stability";
        case Purpose::v_exp_stability: return "v-exp-stability";
        case Purpose::positivity: return "positivity";
        case Purpose::comparison: return "comparison";
    }
    return "?";
}

std::string to_string(TamingCondition c) {
    switch (c) {
        case TamingCondition::integrability: return "integrability";
        case TamingCondition::stability: return "stability";
        case TamingCondition::v_exponential: return "v-exponential";
        case TamingCondition::bar_simplified: return "bar-simplified";
        case TamingCondition::combo: return "combo";
    }
    return "?";
}

std::string to_string(DriftForm f) {
    switch (f) {
        case DriftForm::le_rho_one_plus_v: return "le-rho-one-plus-v";
        case DriftForm::le_minus_z: return "le-minus-z";
        case DriftForm::le_minus_rho_v: return "le-minus-rho-v";
    }
    return "?";
}

void TamingPlan::validate(const LyapunovSpec& lyap) const {
    if (!(beta1 <= 0.5))
        throw config_error("taming plan: beta1 <= 1/2 violated");
    const double beta2_cap = (lyap.subclass == LyapunovSpec::Subclass::general)
                                 ? 0.5 - 1.0 / std::min(lyap.p, 4)
                                 : 0.25;
    if (beta2 > beta2_cap + 1e-12) {
        std::ostringstream msg;
        msg << "taming plan: beta2 = " << beta2 << " exceeds the class cap " << beta2_cap;
        throw config_error(msg.str());
    }
    if (!(h_max > 0.0 && h_max <= 1.0))
        throw config_error("taming plan: h_max in (0,1] violated");
    if (!(mu > 0.0))
        throw config_error("taming plan: mu > 0 violated");
}

TamedCoefficients build_balanced_taming(const SdeModel& model, const LyapunovSpec& lyap,
                                        double mu, double beta2,
                                        std::optional<double> kappa_star,
                                        std::optional<double> C) {
    if (!(mu > 0.0)) throw config_error("balanced taming: mu > 0 violated");
    const double kappa = model.growth.kappa;
    const double ks = kappa_star.value_or(std::max(kappa - 1.0, 0.0));
    if (ks < kappa - 1.0 - 1e-12)
        throw config_error("balanced taming: kappa* >= kappa - 1 violated");
    const double c_min = std::max(model.growth.K / mu, 1.0);
    const double cc = C.value_or(c_min);
    if (cc < c_min - 1e-12)
        throw config_error("balanced taming: C >= (K/mu) v 1 violated");
    if (cc * cc < model.growth.K / mu - 1e-12)
        throw config_error("balanced taming: C^2 >= K/mu violated");

    const double expo = ks * lyap.gamma;
    auto value = lyap.value;
    auto g_sigma = [value, cc, expo, beta2](const Vec& x, double h) {
        return cc * std::pow(value(x), expo) * std::pow(h, beta2);
    };
    TamedCoefficients t;
    t.base = model;
    t.g_sigma = g_sigma;
    t.g_b = [g_sigma](const Vec& x, double h) {
        const double g = g_sigma(x, h);
        return 2.0 * g + g * g;
    };
    t.case_i_exact = true;
    return t;
}

TamedCoefficients build_stability_taming(const SdeModel& model,
                                         const StabilityTamingParams& params) {
    if (!(params.C > 0.0)) throw config_error("stability taming: C > 0 violated");
    if (!(params.alpha > 0.0 && params.alpha <= 1.0))
        throw config_error("stability taming: alpha in (0,1] violated");
    auto u = params.U;
    if (!u) throw config_error("stability taming: dominating function U missing");
    const double e1 = (params.kappa1 - 1.0) * params.gamma;
    const double e2 = (params.kappa2 - 1.0) * params.gamma;
    const double cc = params.C;
    const double alpha = params.alpha;
    auto g = [u, cc, e1, e2, alpha](const Vec& x, double h) {
        const double uv = u(x);
        return cc * std::max(std::pow(uv, e1), std::pow(uv, e2)) * std::pow(h, alpha);
    };
    TamedCoefficients t;
    t.base = model;
    t.g_b = g;
    t.g_sigma = g;
    t.case_i_exact = false;
    return t;
}

TamedCoefficients build_power_taming(const SdeModel& model, double C, double exponent,
                                     double alpha) {
    if (!(C >= 0.0)) throw config_error("power taming: C >= 0 violated");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw config_error("power taming: alpha in (0,1] violated");
    auto g = [C, exponent, alpha](const Vec& x, double h) {
        return C * std::pow(norm(x), exponent) * std::pow(h, alpha);
    };
    TamedCoefficients t;
    t.base = model;
    t.g_b = g;
    t.g_sigma = g;
    t.case_i_exact = false;
    return t;
}

ProjectionExponent derive_projection_exponent(Purpose purpose, const LyapunovSpec& lyap,
                                              const GrowthProfile& growth,
                                              double beta2, double slack) {
    ProjectionExponent out;
    out.slack = slack;
    const double q = growth.q2;
    const double gamma = lyap.gamma;

    double kappa_eff;
    switch (purpose) {
        case Purpose::integrability:
        case Purpose::l2_rate:
            kappa_eff = growth.kappa;
            break;
        case Purpose::as_stability:
        case Purpose::v_exp_stability:
            kappa_eff = std::max(growth.kappa1, growth.kappa2);
            break;
        default:
            throw config_error("no projection-exponent rule for purpose " + to_string(purpose));
    }
    if (kappa_eff <= 1.0) {
        out.unconstrained = true;
        out.bound = std::numeric_limits<double>::infinity();
        out.r = 0.5;
        out.slack = 1.0;
        return out;
    }
    switch (purpose) {
        case Purpose::integrability:
            out.bound = beta2 / ((kappa_eff - 1.0) * q * gamma);
            out.slack = 1.0; // closed inequality, the bound itself is admissible
            break;
        case Purpose::l2_rate:
            out.bound = 1.0 / (2.0 * (kappa_eff - 1.0));
            break;
        case Purpose::as_stability:
        case Purpose::v_exp_stability:
            out.bound = 1.0 / (4.0 * (kappa_eff - 1.0) * q * gamma);
            break;
        default:
            break;
    }
    out.r = out.slack * out.bound;
    return out;
}

double compute_rho_tilde(double c, int p, int d, double mu, RhoTildeMode mode) {
    if (p < 2) throw config_error("rho_tilde requires p >= 2");
    if (!(mu >= 0.0)) throw config_error("rho_tilde requires mu >= 0");
    if (mode == RhoTildeMode::remark) {
        if (mu > 1.0)
            throw config_error("remark-mode rho_tilde requires mu <= 1");
        return c * (p - 1) * std::pow(static_cast<double>(d), p - 1) * mu * mu;
    }
    double total = 0.5 * c * mu * mu;
    for (int s = 3; s <= p; ++s) {
        double half_fact = 1.0;
        for (int k = 2; k <= s / 2; ++k) half_fact *= k;
        const double phi = std::pow(static_cast<double>(d), s - 1) / (half_fact * half_fact);
        total += c * phi * std::pow(mu, s);
    }
    return total;
}

double compute_mu_threshold(double c, int p, int d, std::optional<double> rho) {
    if (p < 2) throw config_error("mu threshold requires p >= 2");
    const double denom = 0.5 * c + c * std::pow(static_cast<double>(d), p - 1) * (p - 2);
    const double numer = rho ? std::sqrt(*rho) : 1.0;
    return numer / std::sqrt(denom);
}

double solve_positivity_h(double mu, double alpha) {
    if (!(mu > 0.0)) return 1.0; // constraint vacuous
    if (!(alpha < 1.0)) return 0.0;
    const double target = 1.0 / mu;
    auto f = [alpha](double h) {
        return std::pow(h, 1.0 - alpha) +
               std::pow(h, 0.5 * (1.0 - alpha)) * std::sqrt(2.0 * std::fabs(std::log(h)));
    };
    // f vanishes as h -> 0 and increases through its first crossing of the
    // target; locate that crossing by geometric scan, then bisect.
    double lo = 1e-12;
    if (f(lo) > target) return 0.0;
    double hi = lo;
    bool crossed = false;
    while (hi < 1.0) {
        const double next = std::min(hi * 1.25, 1.0 - 1e-12);
        if (next <= hi) break;
        if (f(next) > target) {
            lo = hi;
            hi = next;
            crossed = true;
            break;
        }
        hi = next;
        if (hi >= 1.0 - 1e-12) break;
    }
    if (!crossed) return 1.0; // admissible on all of (0,1); capped
    while ((hi - lo) / hi > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > target)
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

double derive_h_threshold(Purpose purpose, const HThresholdParams& p) {
    switch (purpose) {
        case Purpose::as_stability: {
            const double v = std::pow(p.mu * p.lambda / p.K, 4.0);
            return std::min(v, 1.0);
        }
        case Purpose::v_exp_stability: {
            const double beta = 0.25 - p.r * (p.kappa_check - 1.0) * p.q * p.gamma;
            if (beta <= 0.0) return 0.0;
            const double base = p.mu / (2.0 * p.K * std::pow(p.nu, (p.kappa_check - 1.0) * p.gamma));
            if (base <= 0.0) return 0.0;
            return std::min(std::pow(base, 1.0 / beta), 1.0);
        }
        case Purpose::positivity:
        case Purpose::comparison:
            return solve_positivity_h(p.mu, p.alpha);
        case Purpose::integrability:
        case Purpose::l2_rate:
            return 1.0; // no step-size ceiling beyond h <= 1
    }
    return 1.0;
}

namespace {

// Uniform view over tamed and untamed coefficients.
struct CoefficientView {
    const SdeModel* model = nullptr;
    const TamedCoefficients* tamed = nullptr;
    double h = 0.0;

    int dim() const { return model ? model->dim_state : tamed->base.dim_state; }
    const LyapunovSpec* lyap = nullptr;

    Vec drift(double t, const Vec& x) const {
        return tamed ? tamed->drift_at(t, x, h) : model->drift_at(t, x);
    }
    Mat sigma(double t, const Vec& x) const {
        return tamed ? tamed->diffusion_at(t, x, h) : model->diffusion_at(t, x);
    }
    double z_h(const Vec& x, const std::function<double(const Vec&)>& z) const {
        const double zv = z(x);
        return tamed ? zv / (1.0 + tamed->g_b(x, h)) : zv;
    }
};

template <typename Fn>
void for_each_sample(const SampleSpec& spec, int dim, Fn&& fn) {
    PathRng rng(spec.seed);
    for (int n = 0; n < spec.n_samples; ++n) fn(sample_in_ball(rng, dim, spec.radius));
    for (int n = 0; n < spec.n_origin; ++n)
        fn(sample_in_ball(rng, dim, spec.origin_radius));
}

ViolationReport check_conditions_impl(const CoefficientView& view, const LyapunovSpec& lyap,
                                      TamingCondition condition, double mu, double h,
                                      const SampleSpec& spec,
                                      const std::function<double(const Vec&)>& z,
                                      double beta1, double beta2) {
    const bool needs_z = condition != TamingCondition::integrability &&
                         condition != TamingCondition::v_exponential;
    if (needs_z && !z)
        throw config_error("taming condition " + to_string(condition) + " needs a z evaluator");

    TamingCondition effective = condition;
    ViolationReport report;
    if (condition == TamingCondition::combo && lyap.p > 2 && !lyap.higher_derivative_hs_norm) {
        effective = TamingCondition::bar_simplified;
        report.note = "combo condition needs higher-derivative norms; fell back to the bar-simplified form";
    }

    const double hb1 = std::pow(h, beta1);
    const double hb2 = std::pow(h, beta2);

    for_each_sample(spec, view.dim(), [&](const Vec& x) {
        ++report.n_samples;
        const double bn = norm(view.drift(spec.t, x));
        const double sn = frobenius_norm(view.sigma(spec.t, x));
        const double v = lyap.value(x);
        const double u = lyap.u_at(x);

        double lhs = 0.0, rhs = 0.0;
        switch (effective) {
            case TamingCondition::integrability:
                lhs = std::max(bn * hb1, sn * hb2);
                rhs = mu * std::pow(1.0 + v, lyap.gamma);
                break;
            case TamingCondition::stability: {
                const double zh = view.z_h(x, z);
                lhs = std::max(bn * hb1, sn * hb2);
                rhs = mu * std::pow(1.0 + u, lyap.gamma) * zh / (1.0 + u + zh);
                break;
            }
            case TamingCondition::v_exponential:
                lhs = std::max(bn * hb1, sn * hb2);
                rhs = mu * std::pow(v, lyap.gamma);
                break;
            case TamingCondition::bar_simplified: {
                const double zh = view.z_h(x, z);
                const double denom = u + zh;
                lhs = std::max(bn * hb1, sn * hb2);
                rhs = denom > 0.0 ? mu * std::pow(u, lyap.gamma) * zh / denom : 0.0;
                break;
            }
            case TamingCondition::combo: {
                const double zh = view.z_h(x, z);
                rhs = mu * zh;
                lhs = frobenius_norm(lyap.hessian(x)) * bn * bn * h;
                for (int i = 0; i <= lyap.p; ++i) {
                    for (int j = 0; i + 2 * j <= lyap.p; ++j) {
                        const int s = i + 2 * j;
                        if (s < 3) continue;
                        const double vs = (s == 2) ? frobenius_norm(lyap.hessian(x))
                                                   : lyap.higher_derivative_hs_norm(x, s);
                        lhs = std::max(lhs, vs * std::pow(bn, i) * std::pow(sn, 2 * j) *
                                                std::pow(h, 0.5 * (i + j)));
                    }
                }
                break;
            }
        }

        if (rhs <= 0.0) {
            if (lhs > 1e-14) {
                report.hard_violation = true;
                report.worst_x = x;
                report.max_ratio = std::numeric_limits<double>::infinity();
            }
            return;
        }
        const double ratio = lhs / rhs;
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.worst_x = x;
        }
    });

    report.pass = !report.hard_violation && report.max_ratio <= 1.0 + 1e-9;
    return report;
}

ViolationReport check_drift_impl(const CoefficientView& view, const LyapunovSpec& lyap,
                                 DriftForm form, double rho,
                                 const std::function<double(const Vec&)>& z,
                                 const SampleSpec& spec) {
    if (form == DriftForm::le_minus_z && !z)
        throw config_error("drift form le-minus-z needs a z evaluator");

    ViolationReport report;
    report.max_margin = -std::numeric_limits<double>::infinity();
    for_each_sample(spec, view.dim(), [&](const Vec& x) {
        ++report.n_samples;
        const Vec grad = lyap.gradient(x);
        const Mat hess = lyap.hessian(x);
        const double lv = dot(grad, view.drift(spec.t, x)) +
                          0.5 * quadratic_trace(view.sigma(spec.t, x), hess);
        const double v = lyap.value(x);
        double rhs = 0.0;
        switch (form) {
            case DriftForm::le_rho_one_plus_v: rhs = rho * (1.0 + v); break;
            case DriftForm::le_minus_z: rhs = -view.z_h(x, z); break;
            case DriftForm::le_minus_rho_v: rhs = -rho * v; break;
        }
        const double margin = (lv - rhs) / (1.0 + std::fabs(rhs));
        if (margin > report.max_margin) {
            report.max_margin = margin;
            report.worst_x = x;
        }
    });
    report.pass = report.max_margin <= 1e-9;
    report.max_ratio = report.max_margin;
    return report;
}

} // namespace

ViolationReport check_taming_conditions(const TamedCoefficients& coeffs,
                                        const LyapunovSpec& lyap,
                                        TamingCondition condition, double mu, double h,
                                        const SampleSpec& spec,
                                        std::function<double(const Vec&)> z,
                                        double beta1, double beta2) {
    CoefficientView view;
    view.tamed = &coeffs;
    view.h = h;
    return check_conditions_impl(view, lyap, condition, mu, h, spec, z, beta1, beta2);
}

ViolationReport check_taming_conditions(const SdeModel& model, const LyapunovSpec& lyap,
                                        TamingCondition condition, double mu, double h,
                                        const SampleSpec& spec,
                                        std::function<double(const Vec&)> z,
                                        double beta1, double beta2) {
    CoefficientView view;
    view.model = &model;
    view.h = h;
    return check_conditions_impl(view, lyap, condition, mu, h, spec, z, beta1, beta2);
}

ViolationReport check_lyapunov_drift(const SdeModel& model, const LyapunovSpec& lyap,
                                     DriftForm form, double rho,
                                     std::function<double(const Vec&)> z,
                                     const SampleSpec& spec) {
    CoefficientView view;
    view.model = &model;
    return check_drift_impl(view, lyap, form, rho, z, spec);
}

ViolationReport check_lyapunov_drift(const TamedCoefficients& coeffs, const LyapunovSpec& lyap,
                                     double h, DriftForm form, double rho,
                                     std::function<double(const Vec&)> z,
                                     const SampleSpec& spec) {
    CoefficientView view;
    view.tamed = &coeffs;
    view.h = h;
    return check_drift_impl(view, lyap, form, rho, z, spec);
}

ViolationReport check_z_growth(std::function<double(const Vec&)> z,
                               std::function<double(const Vec&)> U,
                               double kappa1, double kappa2, double gamma, double lambda,
                               int dim, const SampleSpec& spec) {
    if (!z || !U) throw config_error("z-growth check needs z and U evaluators");
    ViolationReport report;
    for_each_sample(spec, dim, [&](const Vec& x) {
        ++report.n_samples;
        const double uv = U(x);
        const double lhs = lambda * std::pow(1.0 + uv, 1.0 - gamma) *
                           std::max(std::pow(uv, kappa1 * gamma), std::pow(uv, kappa2 * gamma));
        const double zv = z(x);
        if (zv <= 0.0) {
            if (lhs > 1e-14) {
                report.hard_violation = true;
                report.worst_x = x;
                report.max_ratio = std::numeric_limits<double>::infinity();
            }
            return;
        }
        const double ratio = lhs / zv;
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.worst_x = x;
        }
    });
    report.pass = !report.hard_violation && report.max_ratio <= 1.0 + 1e-9;
    return report;
}

namespace {

double measure_mu_impl(const CoefficientView& view, const LyapunovSpec& lyap, double h,
                       const SampleSpec& spec, double beta1, double beta2) {
    const double hb1 = std::pow(h, beta1);
    const double hb2 = std::pow(h, beta2);
    double mu = 0.0;
    for_each_sample(spec, view.dim(), [&](const Vec& x) {
        const double bn = norm(view.drift(spec.t, x));
        const double sn = frobenius_norm(view.sigma(spec.t, x));
        const double denom = std::pow(1.0 + lyap.value(x), lyap.gamma);
        mu = std::max(mu, std::max(bn * hb1, sn * hb2) / denom);
    });
    return mu;
}

} // namespace

double measure_integrability_mu(const TamedCoefficients& coeffs, const LyapunovSpec& lyap,
                                double h, const SampleSpec& spec,
                                double beta1, double beta2) {
    CoefficientView view;
    view.tamed = &coeffs;
    view.h = h;
    return measure_mu_impl(view, lyap, h, spec, beta1, beta2);
}

double measure_integrability_mu(const SdeModel& model, const LyapunovSpec& lyap,
                                double h, const SampleSpec& spec,
                                double beta1, double beta2) {
    CoefficientView view;
    view.model = &model;
    view.h = h;
    return measure_mu_impl(view, lyap, h, spec, beta1, beta2);
}

} // namespace sdelab
