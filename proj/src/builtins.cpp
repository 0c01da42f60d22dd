#include "sdelab/builtins.hpp"

#include <algorithm>
#include <cmath>

#include "sdelab/errors.hpp"

namespace sdelab::builtins {

SdeModel cubic() {
    SdeModel m;
    m.dim_state = 1;
    m.dim_noise = 1;
    m.drift = [](double, const Vec& x) { return Vec{-x[0] * x[0] * x[0]}; };
    m.diffusion = [](double, const Vec& x) {
        Mat s(1, 1);
        s(0, 0) = x[0] * x[0];
        return s;
    };
    m.growth = GrowthProfile{1.0, 3.0, 3.0, 2.0, 2.0, 2.0, 1.0};
    m.vanishes_at_origin = true;
    m.name = "cubic";
    return m;
}

SdeModel lorenz(const LorenzParams& p) {
    if (!(2.0 * p.alpha1 > p.beta1 * p.beta1))
        throw config_error("lorenz parameter guard violated: 2*alpha1 > beta1^2");
    if (!(p.beta2 * p.beta2 < 2.0))
        throw config_error("lorenz parameter guard violated: beta2^2 < 2");
    if (!(2.0 * p.alpha2 > p.beta3 * p.beta3))
        throw config_error("lorenz parameter guard violated: 2*alpha2 > beta3^2");

    SdeModel m;
    m.dim_state = 3;
    m.dim_noise = 3;
    m.drift = [p](double, const Vec& x) {
        return Vec{p.alpha1 * (x[1] - x[0]),
                   -p.alpha1 * x[0] - x[1] - x[0] * x[2],
                   x[0] * x[1] - p.alpha2 * x[2]};
    };
    m.diffusion = [p](double, const Vec& x) {
        Mat s(3, 3);
        s(0, 0) = p.beta1 * x[0];
        s(1, 1) = p.beta2 * x[1];
        s(2, 2) = p.beta3 * x[2];
        return s;
    };
    const double kb = std::sqrt(5.0 * p.alpha1 * p.alpha1 + 4.0 * p.alpha1 +
                                p.alpha2 * p.alpha2 + 4.0);
    const double ks = std::sqrt(p.beta1 * p.beta1 + p.beta2 * p.beta2 + p.beta3 * p.beta3);
    // U = |x| + |x|^2 <= 2 (1 + |x|^2): kappa1 = 2 (drift), kappa2 = 1.
    m.growth = GrowthProfile{std::max(kb, ks), 2.0, 2.0, 1.0, 1.0, 2.0, 2.0};
    m.vanishes_at_origin = true;
    m.name = "lorenz";
    return m;
}

double lorenz_rho(const LorenzParams& p) {
    return std::min({2.0 * p.alpha1 - p.beta1 * p.beta1,
                     2.0 - p.beta2 * p.beta2,
                     2.0 * p.alpha2 - p.beta3 * p.beta3});
}

SdeModel vdp(const VdpParams& p) {
    if (!(p.alpha1 > 0.0))
        throw config_error("vdp parameter guard violated: alpha1 > 0");
    if (!(2.0 * p.alpha2 > p.beta * p.beta))
        throw config_error("vdp parameter guard violated: 2*alpha2 > beta^2");

    SdeModel m;
    m.dim_state = 2;
    m.dim_noise = 3;
    m.drift = [p](double, const Vec& x) {
        return Vec{x[1] - p.alpha1 * x[0], -p.alpha2 * x[1] - x[0] * x[0] * x[0]};
    };
    m.diffusion = [p](double, const Vec& x) {
        Mat s(2, 3);
        s(1, 1) = p.beta * x[1];
        return s;
    };
    // U = 2(|x| + |x|^4): |b| <= K U^{3/4}, ||sigma|| <= K U^{1/2}; gamma = 1/4.
    const double kb = 2.0 + std::max(p.alpha1, p.alpha2) + std::fabs(p.beta);
    m.growth = GrowthProfile{kb, 3.0, 3.0, 2.0, 1.0, 4.0, 4.0};
    m.vanishes_at_origin = true;
    m.name = "vdp";
    return m;
}

double vdp_rho(const VdpParams& p) {
    return std::min(4.0, 4.0 * p.alpha2 - 2.0 * p.beta * p.beta);
}

SdeModel gbm(double mu, double sigma) {
    SdeModel m;
    m.dim_state = 1;
    m.dim_noise = 1;
    m.drift = [mu](double, const Vec& x) { return Vec{mu * x[0]}; };
    m.diffusion = [sigma](double, const Vec& x) {
        Mat s(1, 1);
        s(0, 0) = sigma * x[0];
        return s;
    };
    m.growth = GrowthProfile{std::max(std::fabs(mu), std::fabs(sigma)),
                             1.0, 1.0, 1.0, 2.0, 2.0, 1.0};
    m.vanishes_at_origin = true;
    m.name = "gbm";
    return m;
}

LinearPair linear_pair(double nu, double lambda, double sigma) {
    if (!(nu <= lambda))
        throw config_error("linear-pair requires nu <= lambda (comparison ordering)");
    LinearPair pair;
    pair.nu = nu;
    pair.lambda = lambda;
    pair.sigma = sigma;
    pair.lower = gbm(nu, sigma);
    pair.lower.name = "linear-pair-lower";
    pair.upper = gbm(lambda, sigma);
    pair.upper.name = "linear-pair-upper";
    return pair;
}

LyapunovSpec norm_power(int dim, int p) {
    if (p < 2 || p % 2 != 0)
        throw config_error("norm-power Lyapunov function requires even p >= 2");

    LyapunovSpec v;
    v.p = p;
    v.gamma = 1.0 / p;
    v.subclass = LyapunovSpec::Subclass::bar;
    v.monotone_radial = true;
    v.name = "norm-power-" + std::to_string(p);

    v.value = [p](const Vec& x) { return std::pow(norm_sq(x), p / 2.0); };
    v.gradient = [p](const Vec& x) {
        const double nsq = norm_sq(x);
        const double scale = (p == 2) ? p : p * std::pow(nsq, p / 2.0 - 1.0);
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = scale * x[i];
        return g;
    };
    v.hessian = [p](const Vec& x) {
        const std::size_t d = x.size();
        const double nsq = norm_sq(x);
        Mat h(d, d);
        if (p == 2) {
            for (std::size_t i = 0; i < d; ++i) h(i, i) = 2.0;
            return h;
        }
        if (nsq == 0.0) return h; // p >= 4: all second derivatives vanish at 0
        const double a = p * std::pow(nsq, p / 2.0 - 1.0);
        const double b = p * (p - 2.0) * std::pow(nsq, p / 2.0 - 2.0);
        for (std::size_t i = 0; i < d; ++i) {
            h(i, i) = a;
            for (std::size_t j = 0; j < d; ++j) h(i, j) += b * x[i] * x[j];
        }
        return h;
    };
    if (p == 2) {
        v.c = 2.0 * std::sqrt(static_cast<double>(dim));
    } else {
        v.c = estimate_lyapunov_c(v, dim) * 1.25;
    }
    return v;
}

LyapunovSpec weighted_poly(const std::vector<double>& coef, const std::vector<int>& powers) {
    if (coef.size() != powers.size() || coef.empty())
        throw config_error("weighted-poly needs matching non-empty coef/powers lists");
    for (std::size_t i = 0; i < coef.size(); ++i) {
        if (!(coef[i] > 0.0)) throw config_error("weighted-poly coefficients must be positive");
        if (powers[i] < 2 || powers[i] % 2 != 0)
            throw config_error("weighted-poly powers must be even and >= 2");
    }

    LyapunovSpec v;
    v.p = *std::max_element(powers.begin(), powers.end());
    v.gamma = 1.0 / v.p;
    v.subclass = LyapunovSpec::Subclass::hat;
    v.monotone_radial = false; // componentwise monotone only
    v.name = "weighted-poly";

    v.value = [coef, powers](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += coef[i] * std::pow(x[i], powers[i]);
        return s;
    };
    v.gradient = [coef, powers](const Vec& x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            g[i] = coef[i] * powers[i] * std::pow(x[i], powers[i] - 1);
        return g;
    };
    v.hessian = [coef, powers](const Vec& x) {
        Mat h(x.size(), x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int pi = powers[i];
            h(i, i) = (pi == 2) ? 2.0 * coef[i]
                                : coef[i] * pi * (pi - 1) * std::pow(x[i], pi - 2);
        }
        return h;
    };
    // The s-th derivative tensor is diagonal with entries
    // coef_i * p_i!/(p_i-s)! * x_i^{p_i-s} (zero once s > p_i).
    v.higher_derivative_hs_norm = [coef, powers](const Vec& x, int s) {
        double sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (powers[i] < s) continue;
            double fall = 1.0;
            for (int k = 0; k < s; ++k) fall *= powers[i] - k;
            const double entry = coef[i] * fall * std::pow(x[i], powers[i] - s);
            sq += entry * entry;
        }
        return std::sqrt(sq);
    };
    v.c = estimate_lyapunov_c(v, static_cast<int>(coef.size())) * 1.25;
    return v;
}

LyapunovSpec vdp_v() {
    LyapunovSpec v = weighted_poly({1.0, 2.0}, {4, 2});
    v.name = "vdp-v";
    return v;
}

std::vector<std::string> model_names() {
    return {"cubic", "lorenz", "vdp", "gbm", "linear-pair"};
}

std::vector<std::string> lyapunov_names() {
    return {"norm-power", "weighted-poly", "vdp-v"};
}

} // namespace sdelab::builtins
