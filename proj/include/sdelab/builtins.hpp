#pragma once

#include <string>
#include <vector>

#include "sdelab/lyapunov.hpp"
#include "sdelab/model.hpp"

namespace sdelab::builtins {

// b = -|x|^2 x, sigma = |x|^2, d = m = 1. Superlinear test equation whose
// trivial solution is almost surely stable (L|x|^2 = -|x|^4).
SdeModel cubic();

struct LorenzParams {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double beta1 = 0.5;
    double beta2 = 0.5;
    double beta3 = 0.5;
};
// Stochastic Lorenz equation in R^3 with diagonal multiplicative noise.
// Parameter guard: 2*alpha1 > beta1^2, beta2^2 < 2, 2*alpha2 > beta3^2.
SdeModel lorenz(const LorenzParams& p);

// Mean-square decay rate of the Lorenz equilibrium:
// rho = (2a1-b1^2) ^ (2-b2^2) ^ (2a2-b3^2), from L|x|^2 = -sum coef_i x_i^2.
double lorenz_rho(const LorenzParams& p);

struct VdpParams {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double beta = 1.0;
};
// Duffing-van der Pol type oscillator, d=2, m=3, noise on the second
// component only. Guard: alpha1 > 0, 2*alpha2 > beta^2.
SdeModel vdp(const VdpParams& p);

// V-decay rate constant for vdp with V = x1^4 + 2 x2^2.
double vdp_rho(const VdpParams& p);

// Linear (geometric Brownian motion) model b = mu x, sigma = sigma x, d=m=1.
SdeModel gbm(double mu, double sigma);

// Comparison pair: two scalar drifts nu*x <= lambda*x with the shared
// diffusion sigma*x; exposed as the two coupled models.
struct LinearPair {
    SdeModel lower;  // drift nu x
    SdeModel upper;  // drift lambda x
    double nu = 0.1;
    double lambda = 0.2;
    double sigma = 0.3;
};
LinearPair linear_pair(double nu, double lambda, double sigma);

// ---- Lyapunov functions ----

// V = |x|^p for even p >= 2 (bar subclass, gamma = 1/p).
LyapunovSpec norm_power(int dim, int p);

// V = sum_i coef_i x_i^{p_i}, even p_i >= 2, coef_i > 0 (hat subclass,
// p = max p_i, gamma = 1/p). Higher-derivative HS norms are supplied
// analytically (the derivative tensors are diagonal).
LyapunovSpec weighted_poly(const std::vector<double>& coef, const std::vector<int>& powers);

// V = x1^4 + 2 x2^2, the Lyapunov function used with the vdp model.
LyapunovSpec vdp_v();

// Catalog entries for the CLI.
std::vector<std::string> model_names();
std::vector<std::string> lyapunov_names();

} // namespace sdelab::builtins
