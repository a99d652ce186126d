#pragma once

#include "weylm/jet.hpp"
#include "weylm/ncalg.hpp"
#include "weylm/recur.hpp"

#include <map>
#include <tuple>

namespace weylm {

/// Constant matrices of the first-order system for y^(n) = Q y:
/// D = dg(omega_1..omega_n), the Vandermonde pair Omega / Omega^{-1}, and the
/// constant shape of the level-1 perturbation, V_1 = p * v1_over_p.
struct BaseMatrices {
    int n = 4;
    std::vector<cplx> omega;
    CMat D, Omega, OmegaInv, v1_over_p;

    static BaseMatrices make(int n = 4) {
        BaseMatrices b;
        b.n = n;
        b.omega.resize(n);
        if (n == 4) {
            b.omega = {cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
        } else {
            for (int k = 0; k < n; ++k) b.omega[k] = std::polar(1.0, 2.0 * pi * k / n);
        }
        b.D = CMat(n);
        b.Omega = CMat(n);
        b.OmegaInv = CMat(n);
        b.v1_over_p = CMat(n);
        for (int k = 0; k < n; ++k) b.D(k, k) = b.omega[k];
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                b.Omega(j, k) = ipow(b.omega[k], j);
                b.OmegaInv(j, k) = ipow(std::conj(b.omega[j]), k) / static_cast<double>(n);
            }
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                if (j != l) b.v1_over_p(j, l) = b.omega[j] / (b.omega[l] - b.omega[j]);
        return b;
    }

    static cplx ipow(cplx w, int k) {
        cplx r = 1.0;
        for (int i = 0; i < k; ++i) r *= w;
        return r;
    }
};

/// Scalar jets of Q = lambda + x^alpha and derived quantities at one point.
/// Q and Q' use the exact derivatives of x^alpha; everything else is jet
/// arithmetic on top of them.
struct ScalarContext {
    double alpha = 1.0;
    cplx lambda;
    int n = 4;
    double x = 0.0;
    int K = 8;
    Jet Q, Qprime, Qroot /*Q^{1/n}*/, Qroot_inv /*Q^{-1/n}*/, p;

    static ScalarContext make(double alpha, cplx lambda, double x, int K, int n = 4) {
        if (x <= 0.0) throw std::invalid_argument("ScalarContext: x must be positive");
        if (alpha <= 0.0) throw std::invalid_argument("ScalarContext: alpha must be positive");
        if (K < 1) throw std::invalid_argument("ScalarContext: K must be >= 1");
        ScalarContext c;
        c.alpha = alpha;
        c.lambda = lambda;
        c.n = n;
        c.x = x;
        c.K = K;
        c.Q = Jet(K);
        c.Qprime = Jet(K);
        c.Q.c[0] = lambda + std::pow(x, alpha);
        double fall = alpha; // alpha (alpha-1) ... falling factorial
        double fact = 1.0;
        for (int k = 1; k <= K; ++k) {
            c.Q.c[static_cast<size_t>(k)] = fall / fact * std::pow(x, alpha - k);
            c.Qprime.c[static_cast<size_t>(k - 1)] =
                fall / fact * static_cast<double>(k) * std::pow(x, alpha - k);
            fall *= (alpha - k);
            fact *= (k + 1);
        }
        // top derivative of Q' beyond the Q jet, still exact
        c.Qprime.c[static_cast<size_t>(K)] = fall / fact * static_cast<double>(K + 1) *
                                             std::pow(x, alpha - K - 1);
        const double inv_n = 1.0 / n;
        c.Qroot = jet_pow(c.Q, inv_n);
        c.Qroot_inv = jet_pow(c.Q, -inv_n);
        c.p = (-inv_n) * (c.Qprime * jet_pow(c.Q, -1.0 - inv_n));
        return c;
    }
};

inline ScalarContext make_context(double alpha, cplx lambda, double x, int K, int n = 4) {
    return ScalarContext::make(alpha, lambda, x, K, n);
}

/// P from its defining commutator P D - D P = V: p_ij = v_ij / (omega_j - omega_i).
inline MatJet realize_P(const MatJet& v1m, const BaseMatrices& base) {
    const int n = v1m.n;
    for (const auto& coeff : v1m.c)
        for (int i = 0; i < n; ++i)
            if (std::abs(coeff(i, i)) > 1e-10 * (1.0 + coeff.max_abs()))
                throw std::invalid_argument("realize_P: input has nonzero diagonal");
    MatJet p(n, v1m.order());
    for (size_t k = 0; k < p.c.size(); ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) p.c[k](i, j) = v1m.c[k](i, j) / (base.omega[j] - base.omega[i]);
    return p;
}

/// Evaluates transcript expressions as matrix jets at the context point,
/// bottom-up with per-atom memoization.
class Evaluator {
public:
    Evaluator(const Transcript& tr, ScalarContext ctx, BaseMatrices base = {})
        : tr_(&tr), ctx_(std::move(ctx)) {
        base_ = (base.n == ctx_.n && !base.omega.empty()) ? std::move(base)
                                                          : BaseMatrices::make(ctx_.n);
    }

    const ScalarContext& context() const { return ctx_; }
    const BaseMatrices& base() const { return base_; }
    const Transcript& transcript() const { return *tr_; }

    const MatJet& atom(const Atom& a) {
        if (a.kind == AtomKind::Dg) {
            dg_scratch_ = matjet_diag(expr(*a.inner));
            return dg_scratch_;
        }
        const Key key{static_cast<int>(a.kind), a.m, a.j};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        MatJet v = compute(a);
        return memo_.emplace(key, std::move(v)).first->second;
    }

    MatJet expr(const NCExpr& e) {
        MatJet sum(ctx_.n, ctx_.K);
        bool any = false;
        for (const auto& t : e.terms) {
            MatJet prod = atom(t.factors.at(0));
            for (size_t i = 1; i < t.factors.size(); ++i) prod = prod * atom(t.factors[i]);
            prod = cplx{static_cast<double>(t.coeff), 0.0} * prod;
            sum = any ? sum + prod : std::move(prod);
            any = true;
        }
        return sum;
    }

    /// Delta_m = sum_{j=2..m} dg S_j; zero at level 1.  S_M is never formed,
    /// so Delta_M = Delta_{M-1}.
    MatJet delta(int m) {
        MatJet d(ctx_.n, ctx_.K);
        for (int j = 2; j <= std::min(m, tr_->M - 1); ++j)
            d = d + matjet_diag(atom(Atom::s(j)));
        return d;
    }

    /// D_m = D + ((n-1)/2) p I + Delta_m
    MatJet d_matrix(int m) {
        MatJet d = atom(Atom::d1());
        if (m >= 2) d = d + delta(m);
        return d;
    }

    /// coefficient matrix F_m = Q^{1/n} (D_m + V_m + E_m) of system m
    MatJet system_matrix(int m) {
        MatJet r = d_matrix(m);
        if (m == 1) {
            r = r + atom(Atom::v(1, 1));
        } else {
            for (int j = 1; j <= tr_->mu(m); ++j)
                if (tr_->has_v(j, m)) r = r + atom(Atom::v(j, m));
        }
        r = r + expr(tr_->e(m));
        return ctx_.Qroot * r;
    }

private:
    using Key = std::tuple<int, int, int>;

    MatJet compute(const Atom& a) {
        const int n = ctx_.n;
        switch (a.kind) {
            case AtomKind::D1: {
                MatJet d = MatJet::constant(base_.D, ctx_.K);
                Jet half = 0.5 * (n - 1.0) * ctx_.p;
                return d + half * MatJet::identity(n, ctx_.K);
            }
            case AtomKind::V:
                if (a.j == 1 && a.m == 1) return ctx_.p * MatJet::constant(base_.v1_over_p, ctx_.K);
                return expr(tr_->v(a.j, a.m));
            case AtomKind::P:
                return realize_P(atom(Atom::v(1, a.m)), base_);
            case AtomKind::DP:
                return cplx{-1.0, 0.0} * (ctx_.Qroot_inv * matjet_derivative(atom(Atom::p(a.m))));
            case AtomKind::S:
                return expr(tr_->s(a.m));
            case AtomKind::T:
                return expr(tr_->t(a.m));
            case AtomKind::E:
                return expr(tr_->e(a.m));
            case AtomKind::IdP:
                return MatJet::identity(n, atom(Atom::p(a.m)).order()) + atom(Atom::p(a.m));
            case AtomKind::Inv:
                return matjet_inverse(atom(Atom::idp(a.m)));
            default:
                throw std::logic_error("Evaluator: unexpected atom kind");
        }
    }

    const Transcript* tr_;
    ScalarContext ctx_;
    BaseMatrices base_;
    std::map<Key, MatJet> memo_;
    MatJet dg_scratch_;
};

/// level-1 matrices: D_1 = D + ((n-1)/2) p I and V_1 with zero diagonal
inline std::pair<MatJet, MatJet> realize_level1(const ScalarContext& ctx,
                                                const BaseMatrices& base) {
    MatJet d1 = MatJet::constant(base.D, ctx.K) +
                (0.5 * (ctx.n - 1.0) * ctx.p) * MatJet::identity(ctx.n, ctx.K);
    MatJet v1 = ctx.p * MatJet::constant(base.v1_over_p, ctx.K);
    return {std::move(d1), std::move(v1)};
}

inline MatJet realize_expr(const NCExpr& e, const ScalarContext& ctx, const Transcript& tr) {
    Evaluator ev(tr, ctx);
    return ev.expr(e);
}

} // namespace weylm
