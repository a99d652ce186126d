#pragma once

#include "weylm/mat.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace weylm {

/// Truncated Taylor expansion of a scalar function at a point: c[k] = f^(k)/k!.
/// Binary operations truncate to the shorter operand, so each analytic
/// derivative taken costs one order of depth.
struct Jet {
    std::vector<cplx> c;

    Jet() = default;
    explicit Jet(int order, cplx v = 0.0) : c(static_cast<size_t>(order) + 1, 0.0) { c[0] = v; }

    int order() const { return static_cast<int>(c.size()) - 1; }
    cplx value() const { return c.empty() ? cplx{} : c[0]; }

    cplx deriv(int d) const {
        if (d > order()) throw std::runtime_error("Jet::deriv: insufficient jet order");
        double f = 1.0;
        for (int i = 2; i <= d; ++i) f *= i;
        return c[static_cast<size_t>(d)] * f;
    }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    r.c.resize(std::min(a.c.size(), b.c.size()));
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    r.c.resize(std::min(a.c.size(), b.c.size()));
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

inline Jet operator-(Jet a) {
    for (auto& v : a.c) v = -v;
    return a;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    const size_t n = std::min(a.c.size(), b.c.size());
    r.c.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; i + j < n; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

inline Jet operator*(cplx s, Jet a) {
    for (auto& v : a.c) v *= s;
    return a;
}

inline Jet operator*(Jet a, cplx s) { return s * std::move(a); }

/// d/dx: shifts Taylor coefficients, dropping one order.
inline Jet jet_derivative(const Jet& a) {
    if (a.c.empty()) throw std::runtime_error("jet_derivative: empty jet");
    Jet r;
    r.c.resize(a.c.size() - 1);
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = static_cast<double>(k + 1) * a.c[k + 1];
    return r;
}

inline Jet jet_reciprocal(const Jet& a) {
    if (a.value() == 0.0) throw std::runtime_error("jet_reciprocal: zero value part");
    Jet r;
    r.c.assign(a.c.size(), 0.0);
    r.c[0] = 1.0 / a.c[0];
    for (size_t k = 1; k < r.c.size(); ++k) {
        cplx s = 0.0;
        for (size_t j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -s / a.c[0];
    }
    return r;
}

/// f^s for complex exponent, principal branch of the leading value.
/// Recurrence from f g' = s f' g:  k f0 g_k = sum_j (j(s+1) - k) f_j g_{k-j}.
inline Jet jet_pow(const Jet& a, cplx s) {
    if (a.value() == 0.0) throw std::runtime_error("jet_pow: zero value part");
    Jet r;
    r.c.assign(a.c.size(), 0.0);
    r.c[0] = std::pow(a.c[0], s);
    for (size_t k = 1; k < r.c.size(); ++k) {
        cplx acc = 0.0;
        for (size_t j = 1; j <= k; ++j)
            acc += (static_cast<double>(j) * (s + 1.0) - static_cast<double>(k)) * a.c[j] * r.c[k - j];
        r.c[k] = acc / (static_cast<double>(k) * a.c[0]);
    }
    return r;
}

/// n x n matrix of jets, stored as Taylor coefficient matrices.
struct MatJet {
    int n = 0;
    std::vector<CMat> c; // c[k] holds the k-th Taylor coefficient of every entry

    MatJet() = default;
    MatJet(int dim, int order) : n(dim), c(static_cast<size_t>(order) + 1, CMat(dim)) {}

    int order() const { return static_cast<int>(c.size()) - 1; }
    const CMat& value() const { return c[0]; }

    static MatJet identity(int dim, int order) {
        MatJet m(dim, order);
        m.c[0] = CMat::identity(dim);
        return m;
    }

    static MatJet constant(const CMat& v, int order) {
        MatJet m(v.dim(), order);
        m.c[0] = v;
        return m;
    }
};

inline MatJet operator+(const MatJet& a, const MatJet& b) {
    MatJet r(a.n, std::min(a.order(), b.order()));
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

inline MatJet operator-(const MatJet& a, const MatJet& b) {
    MatJet r(a.n, std::min(a.order(), b.order()));
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

inline MatJet operator*(const MatJet& a, const MatJet& b) {
    MatJet r(a.n, std::min(a.order(), b.order()));
    for (size_t i = 0; i < r.c.size(); ++i)
        for (size_t j = 0; i + j < r.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

inline MatJet operator*(const Jet& s, const MatJet& a) {
    MatJet r(a.n, std::min<int>(s.order(), a.order()));
    for (size_t i = 0; i < s.c.size(); ++i) {
        if (i >= r.c.size()) break;
        for (size_t j = 0; i + j < r.c.size(); ++j) r.c[i + j] += s.c[i] * a.c[j];
    }
    return r;
}

inline MatJet operator*(cplx s, MatJet a) {
    for (auto& m : a.c) m *= s;
    return a;
}

inline MatJet matjet_derivative(const MatJet& a) {
    if (a.c.size() < 2) throw std::runtime_error("matjet_derivative: insufficient jet order");
    MatJet r(a.n, a.order() - 1);
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = static_cast<double>(k + 1) * cplx{1.0, 0.0} * a.c[k + 1];
    return r;
}

inline MatJet matjet_diag(const MatJet& a) {
    MatJet r(a.n, a.order());
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k].diag_part();
    return r;
}

/// Series inverse: B0 = A0^{-1}, Bk = -A0^{-1} sum_{j=1..k} Aj B_{k-j}.
inline MatJet matjet_inverse(const MatJet& a) {
    MatJet r(a.n, a.order());
    const CMat inv0 = a.c[0].inverse();
    r.c[0] = inv0;
    for (size_t k = 1; k < r.c.size(); ++k) {
        CMat s(a.n);
        for (size_t j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = cplx{-1.0, 0.0} * (inv0 * s);
    }
    return r;
}

} // namespace weylm
