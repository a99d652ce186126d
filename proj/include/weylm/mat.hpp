#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace weylm {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

/// Dense complex n x n matrix, n small (2 or 4 in practice).
class CMat {
public:
    CMat() = default;
    explicit CMat(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }

    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    CMat& operator+=(const CMat& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    CMat& operator*=(cplx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, cplx s) { return a *= s; }
    friend CMat operator*(cplx s, CMat a) { return a *= s; }

    friend CMat operator*(const CMat& a, const CMat& b) {
        const int n = a.n_;
        CMat c(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const cplx aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<cplx> col(int j) const {
        std::vector<cplx> v(n_);
        for (int i = 0; i < n_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    CMat diag_part() const {
        CMat d(n_);
        for (int i = 0; i < n_; ++i) d(i, i) = (*this)(i, i);
        return d;
    }

    /// sup norm: max absolute entry
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double row_abs_sum(int i) const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
        return s;
    }

    /// Gauss-Jordan with partial pivoting; throws on (near-)singular input.
    CMat inverse() const {
        const int n = n_;
        CMat a = *this;
        CMat inv = identity(n);
        for (int col = 0; col < n; ++col) {
            int piv = col;
            double best = std::abs(a(col, col));
            for (int r = col + 1; r < n; ++r) {
                double m = std::abs(a(r, col));
                if (m > best) { best = m; piv = r; }
            }
            if (best < 1e-300)
                throw std::runtime_error("CMat::inverse: singular matrix");
            if (piv != col) {
                for (int j = 0; j < n; ++j) {
                    std::swap(a(piv, j), a(col, j));
                    std::swap(inv(piv, j), inv(col, j));
                }
            }
            const cplx d = a(col, col);
            for (int j = 0; j < n; ++j) { a(col, j) /= d; inv(col, j) /= d; }
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                const cplx f = a(r, col);
                if (f == 0.0) continue;
                for (int j = 0; j < n; ++j) {
                    a(r, j) -= f * a(col, j);
                    inv(r, j) -= f * inv(col, j);
                }
            }
        }
        return inv;
    }

private:
    int n_ = 0;
    std::vector<cplx> a_;
};

/// Fixed-size 2 x 2 complex matrix for the Riccati flow and spectral matrix.
struct Mat2 {
    std::array<cplx, 4> a{};

    static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(2 * i + j)]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(2 * i + j)]; }

    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        Mat2 r;
        for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
        return r;
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) {
        Mat2 r;
        for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] - y.a[i];
        return r;
    }
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        Mat2 r;
        r.a[0] = x.a[0] * y.a[0] + x.a[1] * y.a[2];
        r.a[1] = x.a[0] * y.a[1] + x.a[1] * y.a[3];
        r.a[2] = x.a[2] * y.a[0] + x.a[3] * y.a[2];
        r.a[3] = x.a[2] * y.a[1] + x.a[3] * y.a[3];
        return r;
    }
    friend Mat2 operator*(cplx s, Mat2 x) {
        for (auto& v : x.a) v *= s;
        return x;
    }

    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }

    Mat2 inverse() const {
        const cplx d = det();
        if (std::abs(d) < 1e-300) throw std::runtime_error("Mat2::inverse: singular matrix");
        return Mat2{{a[3] / d, -a[1] / d, -a[2] / d, a[0] / d}};
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

} // namespace weylm
