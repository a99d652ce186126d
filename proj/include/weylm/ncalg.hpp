#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace weylm {

struct NCExpr;

/// Symbolic atoms of the diagonalization recurrences.  Every atom carries an
/// exact integer order counting multiples of the decay unit a = 1 + alpha/n:
///
///   P(m)    ~ x^{-m a}        corrector solving  P D - D P = V_{1m}
///   DP(m)   ~ x^{-(m+1) a}    the composite  -Q^{-1/n} P'_m
///   V(j,m)  ~ x^{-(m+j-1) a}  graded perturbation bucket
///   T(m)    ~ x^{-(m+2) a}    commutator  Delta_m P_m - P_m Delta_m
///   S(m)    ~ x^{-m a}        dominant bucket defining level m
///   E(m)                      remainder, order >= M by construction
///   Inv(m), IdP(m)            (I+P_m)^{-1} and I+P_m, order 0
///   Dg(expr)                  formal diagonal part, order of its argument
///   D1                        the level-1 diagonal D + ((n-1)/2) p I, order 0
enum class AtomKind : unsigned char { D1, P, DP, V, T, S, E, Inv, IdP, Dg };

struct Atom {
    AtomKind kind;
    int m = 0;
    int j = 0;                             // only V uses both indices
    std::shared_ptr<const NCExpr> inner;   // only Dg

    static Atom d1() { return {AtomKind::D1}; }
    static Atom p(int m) { return {AtomKind::P, m}; }
    static Atom dp(int m) { return {AtomKind::DP, m}; }
    static Atom v(int j, int m) { return {AtomKind::V, m, j}; }
    static Atom t(int m) { return {AtomKind::T, m}; }
    static Atom s(int m) { return {AtomKind::S, m}; }
    static Atom e(int m) { return {AtomKind::E, m}; }
    static Atom inv(int m) { return {AtomKind::Inv, m}; }
    static Atom idp(int m) { return {AtomKind::IdP, m}; }
    static Atom dg(NCExpr e);

    std::string name() const;
};

int compare(const Atom& a, const Atom& b);
inline bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }
inline bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }

/// One signed non-commutative product.  Factor order is significant.
struct Term {
    int coeff = 0;
    std::vector<Atom> factors;
};

int compare_factors(const std::vector<Atom>& a, const std::vector<Atom>& b);

/// Normalized sum of terms: sorted by factor sequence, coefficients of equal
/// sequences merged, zero terms dropped.  Equal iff the normal forms agree.
struct NCExpr {
    std::vector<Term> terms;

    bool empty() const { return terms.empty(); }
    size_t term_count() const { return terms.size(); }
};

/// atom order in grading units; M supplies the formal order of E atoms
int atom_order(const Atom& a, int M);
int term_order(const Term& t, int M);

/// all terms share one grading order (empty expressions count as uniform)
bool uniform_order(const NCExpr& e, int M, int* order_out = nullptr);

inline NCExpr normalize(NCExpr e) {
    std::sort(e.terms.begin(), e.terms.end(), [](const Term& x, const Term& y) {
        return compare_factors(x.factors, y.factors) < 0;
    });
    std::vector<Term> out;
    for (auto& t : e.terms) {
        if (t.coeff == 0) continue;
        if (!out.empty() && compare_factors(out.back().factors, t.factors) == 0)
            out.back().coeff += t.coeff;
        else
            out.push_back(std::move(t));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coeff == 0; }),
              out.end());
    e.terms = std::move(out);
    return e;
}

inline NCExpr expr_of(Term t) {
    NCExpr e;
    e.terms.push_back(std::move(t));
    return normalize(std::move(e));
}

inline NCExpr expr_of(Atom a, int coeff = 1) { return expr_of(Term{coeff, {std::move(a)}}); }

inline NCExpr nc_add(const NCExpr& lhs, const NCExpr& rhs) {
    NCExpr e;
    e.terms.reserve(lhs.terms.size() + rhs.terms.size());
    e.terms.insert(e.terms.end(), lhs.terms.begin(), lhs.terms.end());
    e.terms.insert(e.terms.end(), rhs.terms.begin(), rhs.terms.end());
    return normalize(std::move(e));
}

inline NCExpr nc_scale(NCExpr e, int s) {
    for (auto& t : e.terms) t.coeff *= s;
    return normalize(std::move(e));
}

inline NCExpr nc_sub(const NCExpr& lhs, const NCExpr& rhs) {
    return nc_add(lhs, nc_scale(rhs, -1));
}

inline NCExpr nc_mul(const NCExpr& lhs, const NCExpr& rhs) {
    NCExpr e;
    e.terms.reserve(lhs.terms.size() * rhs.terms.size());
    for (const auto& a : lhs.terms)
        for (const auto& b : rhs.terms) {
            Term t;
            t.coeff = a.coeff * b.coeff;
            t.factors = a.factors;
            t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
            e.terms.push_back(std::move(t));
        }
    return normalize(std::move(e));
}

inline bool operator==(const NCExpr& a, const NCExpr& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        if (a.terms[i].coeff != b.terms[i].coeff) return false;
        if (compare_factors(a.terms[i].factors, b.terms[i].factors) != 0) return false;
    }
    return true;
}

struct OrderBuckets {
    std::map<int, NCExpr> by_order; // orders < M only
    NCExpr remainder;               // everything of order >= M
};

/// Buckets terms of order < M by exact order; order >= M goes to the remainder.
inline OrderBuckets collect_by_order(const NCExpr& e, int M) {
    OrderBuckets out;
    std::map<int, NCExpr> raw;
    for (const auto& t : e.terms) {
        const int o = term_order(t, M);
        if (o >= M)
            out.remainder.terms.push_back(t);
        else
            raw[o].terms.push_back(t);
    }
    for (auto& [o, ex] : raw) out.by_order[o] = normalize(std::move(ex));
    out.remainder = normalize(std::move(out.remainder));
    return out;
}

// --- implementation ---

inline Atom Atom::dg(NCExpr e) {
    Atom a{AtomKind::Dg};
    a.inner = std::make_shared<const NCExpr>(normalize(std::move(e)));
    return a;
}

inline int compare(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    if (a.m != b.m) return a.m < b.m ? -1 : 1;
    if (a.j != b.j) return a.j < b.j ? -1 : 1;
    if (a.kind != AtomKind::Dg) return 0;
    const auto& x = a.inner->terms;
    const auto& y = b.inner->terms;
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i].coeff != y[i].coeff) return x[i].coeff < y[i].coeff ? -1 : 1;
        if (int c = compare_factors(x[i].factors, y[i].factors); c != 0) return c;
    }
    return 0;
}

inline int compare_factors(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        if (int c = compare(a[i], b[i]); c != 0) return c;
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

inline int atom_order(const Atom& a, int M) {
    switch (a.kind) {
        case AtomKind::D1: return 0;
        case AtomKind::P: return a.m;
        case AtomKind::DP: return a.m + 1;
        case AtomKind::V: return a.m + a.j - 1;
        case AtomKind::T: return a.m + 2;
        case AtomKind::S: return a.m;
        case AtomKind::E: return M;
        case AtomKind::Inv:
        case AtomKind::IdP: return 0;
        case AtomKind::Dg: {
            int o = 0;
            if (!uniform_order(*a.inner, M, &o))
                throw std::runtime_error("atom_order: Dg argument has mixed order");
            return o;
        }
    }
    throw std::logic_error("atom_order: bad kind");
}

inline int term_order(const Term& t, int M) {
    int o = 0;
    for (const auto& f : t.factors) o += atom_order(f, M);
    return o;
}

inline bool uniform_order(const NCExpr& e, int M, int* order_out) {
    if (e.terms.empty()) {
        if (order_out) *order_out = 0;
        return true;
    }
    const int o = term_order(e.terms.front(), M);
    for (const auto& t : e.terms)
        if (term_order(t, M) != o) return false;
    if (order_out) *order_out = o;
    return true;
}

inline std::string Atom::name() const {
    std::ostringstream os;
    switch (kind) {
        case AtomKind::D1: os << "D1"; break;
        case AtomKind::P: os << "P" << m; break;
        case AtomKind::DP: os << "DP" << m; break;
        case AtomKind::V: os << "V[" << j << "," << m << "]"; break;
        case AtomKind::T: os << "T" << m; break;
        case AtomKind::S: os << "S" << m; break;
        case AtomKind::E: os << "E" << m; break;
        case AtomKind::Inv: os << "A" << m; break;
        case AtomKind::IdP: os << "IP" << m; break;
        case AtomKind::Dg: {
            os << "dg(";
            bool first = true;
            for (const auto& t : inner->terms) {
                if (!first) os << (t.coeff >= 0 ? "+" : "");
                else if (t.coeff < 0) os << "-";
                if (std::abs(t.coeff) != 1) os << std::abs(t.coeff) << "*";
                if (!first && t.coeff < 0) os << "-";
                for (size_t i = 0; i < t.factors.size(); ++i)
                    os << (i ? " " : "") << t.factors[i].name();
                first = false;
            }
            os << ")";
            break;
        }
    }
    return os.str();
}

inline std::string to_string(const NCExpr& e, int M) {
    std::ostringstream os;
    if (e.terms.empty()) return "  (empty)\n";
    for (const auto& t : e.terms) {
        os << "  " << (t.coeff >= 0 ? "+" : "-") << " " << std::abs(t.coeff) << " [";
        for (size_t i = 0; i < t.factors.size(); ++i) os << (i ? " " : "") << t.factors[i].name();
        os << "] order=" << term_order(t, M) << "\n";
    }
    return os.str();
}

} // namespace weylm
