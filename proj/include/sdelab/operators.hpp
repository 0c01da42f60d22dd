#pragma once

#include "sdelab/lyapunov.hpp"
#include "sdelab/model.hpp"
#include "sdelab/tamed.hpp"

namespace sdelab {

// L V(x) = <grad V(x), b(t,x)> + 1/2 tr[ sigma(t,x) V''(x) sigma(t,x)^T ].
double diffusion_operator(const SdeModel& model, const LyapunovSpec& lyap,
                          double t, const Vec& x);

// Same operator with the tamed coefficients (b^h, sigma^h) substituted.
double tamed_diffusion_operator(const TamedCoefficients& tamed, const LyapunovSpec& lyap,
                                double t, const Vec& x, double h);

} // namespace sdelab
