#pragma once

#include "weylm/jet.hpp"
#include "weylm/mat.hpp"

#include <random>

namespace weylm::test {

inline double rel_err(const CMat& a, const CMat& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            num = std::max(num, std::abs(a(i, j) - b(i, j)));
            den = std::max({den, std::abs(a(i, j)), std::abs(b(i, j))});
        }
    return den == 0.0 ? num : num / den;
}

inline double rel_err(cplx a, cplx b) {
    const double den = std::max(std::abs(a), std::abs(b));
    return den == 0.0 ? std::abs(a - b) : std::abs(a - b) / den;
}

/// digits of agreement between two complex values
inline double sig_figs(cplx a, cplx b) {
    const double r = rel_err(a, b);
    if (r == 0.0) return 16.0;
    return -std::log10(r);
}

inline std::mt19937& rng() {
    static std::mt19937 gen(20240811u);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

/// least-squares slope of log|f| against log x
template <class F>
double fitted_decay_exponent(F&& f, double x_lo, double x_hi, int npts = 12) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < npts; ++i) {
        const double t = static_cast<double>(i) / (npts - 1);
        const double x = x_lo * std::pow(x_hi / x_lo, t);
        const double lx = std::log(x), ly = std::log(f(x));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
}

} // namespace weylm::test
