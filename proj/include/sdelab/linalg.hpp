#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace sdelab {

// State vectors are tiny (d <= 3 for the builtin models); plain std::vector
// keeps evaluation order explicit, which the reproducibility contract needs.
using Vec = std::vector<double>;

// Dense row-major matrix, used for diffusion coefficients (d x m) and Hessians.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major, rows*cols

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_sq(const Vec& a) { return dot(a, a); }

// Frobenius (Hilbert-Schmidt) norm.
inline double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return std::sqrt(s);
}

// y = A x  (A is rows x cols, x has cols entries)
inline Vec matvec(const Mat& a, const Vec& x) {
    Vec y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// tr[sigma^T H sigma] accumulated column by column; equals
// sum_s <sigma_col_s, H sigma_col_s> with H symmetric.
inline double quadratic_trace(const Mat& sigma, const Mat& hessian) {
    double total = 0.0;
    for (std::size_t s = 0; s < sigma.cols; ++s) {
        for (std::size_t i = 0; i < sigma.rows; ++i) {
            double hs = 0.0;
            for (std::size_t j = 0; j < sigma.rows; ++j)
                hs += hessian(i, j) * sigma(j, s);
            total += sigma(i, s) * hs;
        }
    }
    return total;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const Mat& m) {
    for (double x : m.data)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec axpy(const Vec& x, double a, const Vec& y) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

} // namespace sdelab
