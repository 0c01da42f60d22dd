#include "sdelab/operators.hpp"

#include <cmath>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

double operator_value(const Vec& grad, const Mat& hess, const Vec& b, const Mat& sigma,
                      const Vec& x) {
    const double drift_part = dot(grad, b);
    const double noise_part = 0.5 * quadratic_trace(sigma, hess);
    const double value = drift_part + noise_part;
    if (!std::isfinite(value))
        throw domain_violation("diffusion operator evaluated to a non-finite value", x);
    return value;
}

} // namespace

double diffusion_operator(const SdeModel& model, const LyapunovSpec& lyap,
                          double t, const Vec& x) {
    if (!all_finite(x)) throw domain_violation("diffusion operator called at non-finite x", x);
    return operator_value(lyap.gradient(x), lyap.hessian(x),
                          model.drift_at(t, x), model.diffusion_at(t, x), x);
}

double tamed_diffusion_operator(const TamedCoefficients& tamed, const LyapunovSpec& lyap,
                                double t, const Vec& x, double h) {
    if (!all_finite(x)) throw domain_violation("diffusion operator called at non-finite x", x);
    return operator_value(lyap.gradient(x), lyap.hessian(x),
                          tamed.drift_at(t, x, h), tamed.diffusion_at(t, x, h), x);
}

} // namespace sdelab
