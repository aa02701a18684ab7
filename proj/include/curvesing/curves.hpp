#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvesing/normal_form.hpp"

namespace curvesing {

// A named curve germ given as a union of branches; no two branches may
// parametrize the same branch.
struct CurveSet {
    std::string name;
    std::vector<BranchParam> branches;
};

namespace detail {

// Rounded quotient for the Euclidean algorithm in Z[i].
inline mpz_class round_div(const mpz_class& n, const mpz_class& d) {
    // nearest integer to n/d, d > 0
    mpz_class q;
    mpz_class two_n = 2 * n + d;
    mpz_fdiv_q(q.get_mpz_t(), two_n.get_mpz_t(), mpz_class(2 * d).get_mpz_t());
    return q;
}

struct Gz {
    mpz_class re, im;
    bool zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

inline Gz gz_mul(const Gz& a, const Gz& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Gz gz_sub(const Gz& a, const Gz& b) { return {a.re - b.re, a.im - b.im}; }
inline Gz gz_conj(const Gz& a) { return {a.re, mpz_class(-a.im)}; }

// Euclidean gcd in Z[i] (up to a unit).
inline Gz gz_gcd(Gz a, Gz b) {
    while (!b.zero()) {
        mpz_class nb = b.re * b.re + b.im * b.im;
        Gz num = gz_mul(a, gz_conj(b));
        Gz q{round_div(num.re, nb), round_div(num.im, nb)};
        Gz r = gz_sub(a, gz_mul(q, b));
        a = b;
        b = r;
    }
    return a;
}

// Exact division in Q(i)[x, y]; throws when not divisible.
inline BivariatePoly divide_exact(BivariatePoly f, const BivariatePoly& g) {
    if (g.is_zero()) throw Error("internal: division by the zero polynomial");
    BivariatePoly q;
    while (!f.is_zero()) {
        auto lf = std::prev(f.terms().end());
        auto lg = std::prev(g.terms().end());
        auto [fx, fy] = lf->first;
        auto [gx, gy] = lg->first;
        if (fx < gx || fy < gy) throw Error("internal: inexact polynomial division");
        GaussianRational c = lf->second / lg->second;
        BivariatePoly term = BivariatePoly::monomial(fx - gx, fy - gy, c);
        q = q + term;
        f = f - term * g;
    }
    return q;
}

inline BivariatePoly poly_pow(const BivariatePoly& p, std::int64_t n) {
    BivariatePoly acc = BivariatePoly::constant(GaussianRational(1));
    for (std::int64_t k = 0; k < n; ++k) acc = acc * p;
    return acc;
}

// Polynomials in t with coefficients in Q(i)[x, y].
using TPoly = std::vector<BivariatePoly>;

inline void trim(TPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}
inline std::int64_t deg(const TPoly& p) { return static_cast<std::int64_t>(p.size()) - 1; }
inline const BivariatePoly& lc(const TPoly& p) { return p.back(); }

inline TPoly tpoly_scale(const TPoly& p, const BivariatePoly& c) {
    TPoly r(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) r[k] = p[k] * c;
    return r;
}

inline TPoly tpoly_divide_exact(const TPoly& p, const BivariatePoly& c) {
    TPoly r(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        r[k] = p[k].is_zero() ? BivariatePoly{} : divide_exact(p[k], c);
    return r;
}

// Pseudo remainder: lc(B)^(deg A - deg B + 1) * A modulo B.
inline TPoly prem(TPoly A, const TPoly& B) {
    const BivariatePoly& d = lc(B);
    std::int64_t e = deg(A) - deg(B) + 1;
    while (!A.empty() && deg(A) >= deg(B)) {
        BivariatePoly la = lc(A);
        std::int64_t shift = deg(A) - deg(B);
        TPoly S(static_cast<std::size_t>(shift) + B.size());
        for (std::size_t k = 0; k < B.size(); ++k)
            S[static_cast<std::size_t>(shift) + k] = B[k] * la;
        TPoly next(std::max(A.size(), S.size()));
        for (std::size_t k = 0; k < next.size(); ++k) {
            BivariatePoly a = k < A.size() ? A[k] * d : BivariatePoly{};
            BivariatePoly s = k < S.size() ? S[k] : BivariatePoly{};
            next[k] = a - s;
        }
        trim(next);
        A = std::move(next);
        --e;
    }
    BivariatePoly scale = poly_pow(d, e);
    TPoly r = tpoly_scale(A, scale);
    trim(r);
    return r;
}

// Subresultant pseudo-remainder scheme; result is the resultant up to sign.
inline BivariatePoly resultant(TPoly A, TPoly B) {
    trim(A);
    trim(B);
    if (A.empty() || B.empty()) return {};
    if (deg(A) < deg(B)) std::swap(A, B);
    if (deg(B) == 0) return poly_pow(B[0], std::max<std::int64_t>(deg(A), 0));
    BivariatePoly g = BivariatePoly::constant(GaussianRational(1));
    BivariatePoly h = g;
    for (;;) {
        std::int64_t delta = deg(A) - deg(B);
        TPoly R = prem(A, B);
        if (R.empty()) return {};
        A = std::move(B);
        BivariatePoly divisor = g * poly_pow(h, delta);
        B = tpoly_divide_exact(R, divisor);
        trim(B);
        g = lc(A);
        if (delta > 0) h = divide_exact(poly_pow(g, delta), poly_pow(h, delta - 1));
        if (deg(B) <= 0) {
            if (B.empty()) return {};
            std::int64_t da = deg(A);
            return divide_exact(poly_pow(B[0], da), poly_pow(h, da - 1));
        }
    }
}

} // namespace detail

// Scales a nonzero polynomial to Gaussian-integer coefficients of content 1
// and fixes the unit so the lexicographically largest monomial has a
// coefficient with positive real part (or, on the imaginary axis, positive
// imaginary part).
inline BivariatePoly content_normalized(const BivariatePoly& p) {
    if (p.is_zero()) return p;
    mpz_class den(1);
    for (const auto& [k, c] : p.terms()) {
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.real().get_den().get_mpz_t());
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.imag().get_den().get_mpz_t());
    }
    detail::Gz g{0, 0};
    std::vector<std::pair<BivariatePoly::Key, detail::Gz>> ints;
    for (const auto& [k, c] : p.terms()) {
        mpq_class re = c.real() * den, im = c.imag() * den;
        detail::Gz z{re.get_num(), im.get_num()};
        g = detail::gz_gcd(g, z);
        ints.emplace_back(k, z);
    }
    BivariatePoly out;
    mpz_class ng = g.re * g.re + g.im * g.im;
    for (auto& [k, z] : ints) {
        detail::Gz q = detail::gz_mul(z, detail::gz_conj(g));
        mpq_class re(q.re, ng), im(q.im, ng);
        re.canonicalize();
        im.canonicalize();
        out.add_term(k.first, k.second, GaussianRational(re, im));
    }
    // rotate the leading coefficient into the quarter-plane re > 0, im >= 0,
    // which holds exactly one associate of it
    GaussianRational lead = std::prev(out.terms().end())->second;
    for (const GaussianRational& unit :
         {GaussianRational(1), GaussianRational::i(), GaussianRational(-1), -GaussianRational::i()}) {
        GaussianRational rotated = lead * unit;
        if (sgn(rotated.real()) > 0 && sgn(rotated.imag()) >= 0) return out.scaled(unit);
    }
    throw Error("internal: unit normalization failed");
}

inline bool equal_up_to_unit(const BivariatePoly& a, const BivariatePoly& b) {
    return content_normalized(a) == content_normalized(b);
}

// Implicit equation of a polynomial branch: the resultant in the parameter of
// (x - X(t), y - Y(t)), normalized to content 1.
inline BivariatePoly implicitize(const BranchParam& b) {
    if (!b.exact) throw NonPolynomialInput();
    detail::TPoly A{BivariatePoly::variable_x()};
    for (const auto& [e, c] : b.x.coeffs()) {
        A.resize(std::max<std::size_t>(A.size(), static_cast<std::size_t>(e) + 1));
        A[static_cast<std::size_t>(e)] = BivariatePoly::constant(-c);
    }
    detail::TPoly B{BivariatePoly::variable_y()};
    for (const auto& [e, c] : b.y.coeffs()) {
        B.resize(std::max<std::size_t>(B.size(), static_cast<std::size_t>(e) + 1));
        B[static_cast<std::size_t>(e)] = BivariatePoly::constant(-c);
    }
    BivariatePoly res = detail::resultant(std::move(A), std::move(B));
    if (res.is_zero()) throw Error("internal: resultant of a parametrized branch vanished");
    return content_normalized(res);
}

// Order of vanishing of the implicit equation of b2 along b1 (exact: all
// entries are polynomials, so the pullback is a polynomial in t).
inline std::int64_t intersection_multiplicity(const BranchParam& b1, const BranchParam& b2) {
    if (!b1.exact || !b2.exact) throw NonPolynomialInput();
    BranchParam p1 = primitive_reduce(b1);
    BranchParam p2 = primitive_reduce(b2);
    BivariatePoly f2 = implicitize(p2);
    Exp dx = 0, dy = 0;
    for (Exp e : p1.x.support()) dx = std::max(dx, e);
    for (Exp e : p1.y.support()) dy = std::max(dy, e);
    Exp bound = 1;
    for (const auto& [k, c] : f2.terms()) bound = std::max(bound, k.first * dx + k.second * dy);
    BranchParam m = materialize(p1, bound);
    TruncatedSeries val = eval_on_branch(f2, m.x, m.y, bound);
    auto o = val.order();
    if (!o) {
        if (equal_up_to_unit(implicitize(p1), f2)) throw SameBranch();
        throw Error("internal: vanishing pullback for distinct branches");
    }
    return *o;
}

// Pairwise intersection multiplicities; the diagonal carries the marker -1.
inline std::vector<std::vector<std::int64_t>> intersection_matrix(const CurveSet& c) {
    if (c.branches.empty()) throw PreconditionError("intersection_matrix: curve has no branches");
    std::size_t n = c.branches.size();
    std::vector<std::vector<std::int64_t>> m(n, std::vector<std::int64_t>(n, -1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            m[i][j] = intersection_multiplicity(c.branches[i], c.branches[j]);
            m[j][i] = m[i][j];
        }
    return m;
}

// Rejects curve sets in which two entries parametrize the same branch.
inline void validate_curve_set(const CurveSet& c) {
    std::vector<BivariatePoly> eqs;
    for (const BranchParam& b : c.branches) {
        if (!b.exact) return; // only polynomial branches are comparable
        eqs.push_back(implicitize(primitive_reduce(b)));
    }
    for (std::size_t i = 0; i < eqs.size(); ++i)
        for (std::size_t j = i + 1; j < eqs.size(); ++j)
            if (eqs[i] == eqs[j])
                throw ValidationError("curve '" + c.name + "' repeats a branch", c.name);
}

struct TopologicalDecision {
    bool equivalent = false;
    std::optional<std::vector<std::size_t>> bijection; // branch i of c1 -> bijection[i] of c2
    std::string reason;
};

// Topological equivalence: some bijection of branches matching semigroups and
// conjugating the intersection matrices.  Exhaustive with pruning; branch
// count is capped.
inline TopologicalDecision topologically_equivalent(const CurveSet& c1, const CurveSet& c2,
                                                    std::optional<Exp> precision = {}) {
    TopologicalDecision out;
    if (c1.branches.size() > 10 || c2.branches.size() > 10) throw TooManyBranches();
    if (c1.branches.empty() || c2.branches.empty())
        throw PreconditionError("topologically_equivalent: curves must have branches");
    if (c1.branches.size() != c2.branches.size()) {
        out.reason = "branch counts differ";
        return out;
    }
    const std::size_t n = c1.branches.size();

    using Key = std::pair<std::vector<std::int64_t>, std::int64_t>; // generators, conductor
    auto key_of = [&](const BranchParam& b) -> Key {
        BranchAnalysis a = analyze(b, precision);
        return {a.gamma.sg.generators, a.gamma.sg.conductor};
    };
    std::vector<Key> k1(n), k2(n);
    for (std::size_t i = 0; i < n; ++i) {
        k1[i] = key_of(c1.branches[i]);
        k2[i] = key_of(c2.branches[i]);
    }
    std::vector<std::vector<std::int64_t>> m1, m2;
    if (n > 1) {
        m1 = intersection_matrix(c1);
        m2 = intersection_matrix(c2);
    }

    std::vector<std::size_t> perm(n);
    std::vector<char> used(n, 0);
    auto dfs = [&](auto&& self, std::size_t i) -> bool {
        if (i == n) return true;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || !(k1[i] == k2[j])) continue;
            bool ok = true;
            for (std::size_t p = 0; p < i && ok; ++p)
                if (m1[p][i] != m2[perm[p]][j]) ok = false;
            if (!ok) continue;
            used[j] = 1;
            perm[i] = j;
            if (self(self, i + 1)) return true;
            used[j] = 0;
        }
        return false;
    };
    if (dfs(dfs, 0)) {
        out.equivalent = true;
        out.bijection = perm;
    } else {
        out.reason = "no branch bijection preserves semigroups and intersection numbers";
    }
    return out;
}

struct SmoothDecision {
    bool equivalent = false;
    bool via_conjugate = false;
    std::optional<EquivalenceCertificate> certificate;
};

// Diffeomorphism equivalence for single singular branches: analytic
// equivalence to the other curve or to its conjugate.
inline SmoothDecision smooth_equivalent(const CurveSet& c1, const CurveSet& c2,
                                        std::optional<Exp> precision = {}) {
    if (c1.branches.size() != 1 || c2.branches.size() != 1) throw UnsupportedMultiBranch();
    const BranchParam& b1 = c1.branches.front();
    const BranchParam& b2 = c2.branches.front();
    BranchAnalysis a1 = analyze(b1, precision);
    BranchAnalysis a2 = analyze(b2, precision);
    if (a1.smooth || a2.smooth) throw UnsupportedSmoothBranches();
    NormalFormData n1 = eliminate(a1);
    NormalFormData n2 = eliminate(a2);
    SmoothDecision out;
    EquivalenceDecision direct = analytic_equivalent_reduced(a1, n1, a2, n2);
    if (direct.equivalent) {
        out.equivalent = true;
        out.certificate = direct.certificate;
        return out;
    }
    BranchAnalysis a2c = analyze(conjugate_branch(b2), precision);
    NormalFormData n2c = eliminate(a2c);
    EquivalenceDecision conj = analytic_equivalent_reduced(a1, n1, a2c, n2c);
    if (conj.equivalent) {
        out.equivalent = true;
        out.via_conjugate = true;
        out.certificate = conj.certificate;
    }
    return out;
}

inline CurveSet conjugate_curve(const CurveSet& c) {
    CurveSet out;
    out.name = c.name;
    for (const BranchParam& b : c.branches) out.branches.push_back(b.conj());
    return out;
}

} // namespace curvesing
