#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "sdelab/errors.hpp"
#include "sdelab/tamed.hpp"

namespace sdelab {

// Projection onto the ball of radius h^{-r}. The radial variant rescales the
// whole vector and is the identity on the full ball; the componentwise
// variant clamps each component at +-h^{-r}/sqrt(d), so it is the identity
// only when every |x_i| <= h^{-r}/sqrt(d). Both are idempotent and keep
// |Pi x| <= h^{-r}.
struct ProjectionConfig {
    enum class Variant { radial, componentwise };

    double r = 0.25;
    Variant variant = Variant::radial;

    double radius(double h) const { return std::pow(h, -r); }

    Vec apply(const Vec& x, double h) const;
};

// Noise truncation zeta_h = clamp(xi, +-A_h) with A_h = sqrt(2|log h|).
// h = 1 gives A_h = 0 (all noise killed) and is rejected.
struct NoiseTruncation {
    bool enabled = false;

    static double a_h(double h) {
        if (!(h > 0.0 && h < 1.0))
            throw config_error("noise truncation requires h in (0,1): A_h = sqrt(2|log h|) degenerates at h = 1");
        return std::sqrt(2.0 * std::fabs(std::log(h)));
    }
};

enum class SchemeKind {
    standard,
    balanced,
    projected,
    composed,
    truncated_noise,
    truncated_noise_balanced,
};

std::string to_string(SchemeKind kind);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::standard;
    std::optional<TamedCoefficients> taming;      // balanced/composed/truncated_noise_balanced
    std::optional<ProjectionConfig> projection;   // projected/composed
    double h = 0.01;
    double T = 1.0;

    long n_steps() const { return static_cast<long>(std::floor(T / h)); }

    bool uses_taming() const {
        return kind == SchemeKind::balanced || kind == SchemeKind::composed ||
               kind == SchemeKind::truncated_noise_balanced;
    }
    bool uses_projection() const {
        return kind == SchemeKind::projected || kind == SchemeKind::composed;
    }
    bool truncates_noise() const {
        return kind == SchemeKind::truncated_noise || kind == SchemeKind::truncated_noise_balanced;
    }

    // Throws config_error naming the violated condition.
    void validate() const;
};

// ---- one-step maps ----
// dW is the Brownian increment over the step; xi a raw N(0,1) draw vector.

Vec step_standard(const SdeModel& model, double t, const Vec& x, const Vec& dW, double h);

Vec step_balanced(const TamedCoefficients& tamed, double t, const Vec& x, const Vec& dW, double h);

Vec step_projected(const SdeModel& model, const ProjectionConfig& projection,
                   double t, const Vec& x, const Vec& dW, double h);

Vec step_composed(const TamedCoefficients& tamed, const ProjectionConfig& projection,
                  double t, const Vec& x, const Vec& dW, double h);

// Componentwise clamp of a standard normal draw at +-A_h.
Vec truncate_noise(const Vec& xi, double h);

// x + b^h h + sigma^h sqrt(h) zeta_h. Pass identity taming for the untamed form.
Vec step_truncated_noise(const TamedCoefficients& tamed, double t, const Vec& x,
                         const Vec& xi, double h);

// Uniform per-step driver: advances one step of the configured scheme given
// the raw normal draws xi for this step (dW = sqrt(h) * xi). For schemes run
// on coarsened grids the caller supplies xi = aggregated_dW / sqrt(h), which
// is again standard normal.
class OneStep {
public:
    OneStep(const SdeModel& model, const SchemeConfig& scheme);

    Vec operator()(double t, const Vec& x, const Vec& xi) const;

    // Initial states are pre-projected so |X_0| <= h^{-r} holds inductively.
    Vec prepare_initial(const Vec& x0) const;

    const SdeModel& model() const { return *model_; }
    const SchemeConfig& scheme() const { return *scheme_; }

private:
    const SdeModel* model_;
    const SchemeConfig* scheme_;
    double sqrt_h_;
    std::optional<TamedCoefficients> identity_; // for untamed truncated-noise stepping
};

} // namespace sdelab
