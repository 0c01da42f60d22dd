#include "sdelab/schemes.hpp"

#include <algorithm>
#include <cmath>

namespace sdelab {

Vec ProjectionConfig::apply(const Vec& x, double h) const {
    const double rad = radius(h);
    if (variant == Variant::radial) {
        const double n = norm(x);
        if (n <= rad) return x;
        Vec y(x);
        const double scale = rad / n;
        for (double& v : y) v *= scale;
        return y;
    }
    // componentwise: clamp each coordinate at +-h^{-r}/sqrt(d), so the image
    // stays in the ball of radius h^{-r} and the map is idempotent.
    const double bound = rad / std::sqrt(static_cast<double>(x.size()));
    Vec y(x);
    for (double& v : y) v = std::clamp(v, -bound, bound);
    return y;
}

std::string to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::standard: return "standard";
        case SchemeKind::balanced: return "balanced";
        case SchemeKind::projected: return "projected";
        case SchemeKind::composed: return "composed";
        case SchemeKind::truncated_noise: return "truncated-noise";
        case SchemeKind::truncated_noise_balanced: return "truncated-noise-balanced";
    }
    return "?";
}

void SchemeConfig::validate() const {
    if (!(h > 0.0 && h <= 1.0))
        throw config_error("h in (0,1] violated (h = " + std::to_string(h) + ")");
    if (!(T > 0.0) || n_steps() < 1)
        throw config_error("horizon violates floor(T/h) >= 1");
    if (uses_taming() && !taming)
        throw config_error(to_string(kind) + " scheme requires taming coefficients");
    if (uses_projection() && !projection)
        throw config_error(to_string(kind) + " scheme requires a projection config");
    if (projection && !(projection->r > 0.0))
        throw config_error("projection exponent r must be positive");
    if (truncates_noise())
        NoiseTruncation::a_h(h); // rejects h = 1
}

Vec step_standard(const SdeModel& model, double t, const Vec& x, const Vec& dW, double h) {
    const Vec b = model.drift(t, x);
    const Mat s = model.diffusion(t, x);
    Vec y(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double noise = 0.0;
        for (std::size_t j = 0; j < s.cols; ++j) noise += s(i, j) * dW[j];
        y[i] += b[i] * h + noise;
    }
    return y;
}

Vec step_balanced(const TamedCoefficients& tamed, double t, const Vec& x, const Vec& dW,
                  double h) {
    const Vec b = tamed.base.drift(t, x);
    const Mat s = tamed.base.diffusion(t, x);
    const double bscale = 1.0 / (1.0 + tamed.g_b(x, h));
    const double sscale = 1.0 / (1.0 + tamed.g_sigma(x, h));
    Vec y(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double noise = 0.0;
        for (std::size_t j = 0; j < s.cols; ++j) noise += s(i, j) * dW[j];
        y[i] += b[i] * bscale * h + noise * sscale;
    }
    return y;
}

Vec step_projected(const SdeModel& model, const ProjectionConfig& projection,
                   double t, const Vec& x, const Vec& dW, double h) {
    return projection.apply(step_standard(model, t, x, dW, h), h);
}

Vec step_composed(const TamedCoefficients& tamed, const ProjectionConfig& projection,
                  double t, const Vec& x, const Vec& dW, double h) {
    return projection.apply(step_balanced(tamed, t, x, dW, h), h);
}

Vec truncate_noise(const Vec& xi, double h) {
    const double band = NoiseTruncation::a_h(h);
    Vec zeta(xi);
    for (double& v : zeta) v = std::clamp(v, -band, band);
    return zeta;
}

Vec step_truncated_noise(const TamedCoefficients& tamed, double t, const Vec& x,
                         const Vec& xi, double h) {
    const Vec zeta = truncate_noise(xi, h);
    const double sqrt_h = std::sqrt(h);
    Vec dW(zeta.size());
    for (std::size_t j = 0; j < zeta.size(); ++j) dW[j] = sqrt_h * zeta[j];
    return step_balanced(tamed, t, x, dW, h);
}

OneStep::OneStep(const SdeModel& model, const SchemeConfig& scheme)
    : model_(&model), scheme_(&scheme), sqrt_h_(std::sqrt(scheme.h)) {
    scheme.validate();
    if (scheme.kind == SchemeKind::truncated_noise)
        identity_ = TamedCoefficients::identity(model);
}

Vec OneStep::prepare_initial(const Vec& x0) const {
    if (scheme_->uses_projection()) return scheme_->projection->apply(x0, scheme_->h);
    return x0;
}

Vec OneStep::operator()(double t, const Vec& x, const Vec& xi) const {
    const double h = scheme_->h;
    switch (scheme_->kind) {
        case SchemeKind::standard: {
            Vec dW(xi.size());
            for (std::size_t j = 0; j < xi.size(); ++j) dW[j] = sqrt_h_ * xi[j];
            return step_standard(*model_, t, x, dW, h);
        }
        case SchemeKind::balanced: {
            Vec dW(xi.size());
            for (std::size_t j = 0; j < xi.size(); ++j) dW[j] = sqrt_h_ * xi[j];
            return step_balanced(*scheme_->taming, t, x, dW, h);
        }
        case SchemeKind::projected: {
            Vec dW(xi.size());
            for (std::size_t j = 0; j < xi.size(); ++j) dW[j] = sqrt_h_ * xi[j];
            return step_projected(*model_, *scheme_->projection, t, x, dW, h);
        }
        case SchemeKind::composed: {
            Vec dW(xi.size());
            for (std::size_t j = 0; j < xi.size(); ++j) dW[j] = sqrt_h_ * xi[j];
            return step_composed(*scheme_->taming, *scheme_->projection, t, x, dW, h);
        }
        case SchemeKind::truncated_noise:
            return step_truncated_noise(*identity_, t, x, xi, h);
        case SchemeKind::truncated_noise_balanced:
            return step_truncated_noise(*scheme_->taming, t, x, xi, h);
    }
    throw config_error("unknown scheme kind");
}

} // namespace sdelab
