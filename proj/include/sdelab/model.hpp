#pragma once

#include <functional>
#include <string>

#include "sdelab/errors.hpp"
#include "sdelab/linalg.hpp"

namespace sdelab {

// Coefficient growth metadata. K and kappa express the integrability-style
// bound |b| v ||sigma|| <= K(1+V^{kappa*gamma}); kappa1/kappa2 the
// stability-style bounds |b| <= K U^{kappa1*gamma}, ||sigma|| <= K U^{kappa2*gamma}
// against the dominating function U, itself bounded by nu*(1+|x|^q2).
struct GrowthProfile {
    double K = 1.0;
    double kappa = 1.0;       // shared exponent, integrability form
    double kappa1 = 1.0;      // drift exponent, stability form
    double kappa2 = 1.0;      // diffusion exponent, stability form
    double q1 = 1.0;          // low polynomial degree of U
    double q2 = 1.0;          // high polynomial degree of U (the binding q)
    double nu = 1.0;          // U(x) <= nu*(1 + |x|^q2)
};

// A d-dimensional SDE dX = b(t,X)dt + sigma(t,X)dW with m-dimensional noise.
// Evaluators must be pure; this is a documented contract, not enforced.
struct SdeModel {
    int dim_state = 1;
    int dim_noise = 1;
    std::function<Vec(double, const Vec&)> drift;       // (t,x) -> R^d
    std::function<Mat(double, const Vec&)> diffusion;   // (t,x) -> R^{d x m}
    GrowthProfile growth;
    bool time_homogeneous = true;
    bool vanishes_at_origin = false; // b(t,0)=0 and sigma(t,0)=0 for all t
    std::string name = "custom";

    Vec drift_at(double t, const Vec& x) const {
        Vec b = drift(t, x);
        if (!all_finite(b))
            throw domain_violation("drift evaluated to a non-finite value at x", x);
        return b;
    }

    Mat diffusion_at(double t, const Vec& x) const {
        Mat s = diffusion(t, x);
        if (!all_finite(s))
            throw domain_violation("diffusion evaluated to a non-finite value at x", x);
        return s;
    }
};

} // namespace sdelab
