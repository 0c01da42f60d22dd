#pragma once

#include <functional>

#include "sdelab/model.hpp"

namespace sdelab {

// Balanced taming: b^h = b / (1 + G_b(x,h)), sigma^h = sigma / (1 + G_sigma(x,h))
// with G_b, G_sigma >= 0. When case_i_exact, 1 + G_b == (1 + G_sigma)^2 holds
// identically, which transfers drift conditions L V <= rho(1+V) to L^h V.
struct TamedCoefficients {
    SdeModel base;
    std::function<double(const Vec&, double)> g_b;
    std::function<double(const Vec&, double)> g_sigma;
    bool case_i_exact = false;

    Vec drift_at(double t, const Vec& x, double h) const {
        Vec b = base.drift_at(t, x);
        const double scale = 1.0 / (1.0 + g_b(x, h));
        for (double& v : b) v *= scale;
        return b;
    }

    Mat diffusion_at(double t, const Vec& x, double h) const {
        Mat s = base.diffusion_at(t, x);
        const double scale = 1.0 / (1.0 + g_sigma(x, h));
        for (double& v : s.data) v *= scale;
        return s;
    }

    // Identity taming (G == 0): tamed coefficients coincide with the base.
    static TamedCoefficients identity(SdeModel model) {
        TamedCoefficients t;
        t.base = std::move(model);
        t.g_b = [](const Vec&, double) { return 0.0; };
        t.g_sigma = [](const Vec&, double) { return 0.0; };
        t.case_i_exact = false;
        return t;
    }
};

} // namespace sdelab
