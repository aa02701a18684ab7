#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "curvesing/bivariate.hpp"
#include "curvesing/errors.hpp"
#include "curvesing/gaussian.hpp"
#include "curvesing/series.hpp"

namespace curvesing {

using Exp = TruncatedSeries::Exp;

// A parametrized branch t -> (x(t), y(t)), both components of positive order.
// `exact` marks entries that are honest polynomials: every coefficient beyond
// the stored precision is known to be zero, so the branch can be
// re-materialised at any working precision.
struct BranchParam {
    TruncatedSeries x, y;
    bool exact = false;

    static BranchParam from_polys(const std::map<Exp, GaussianRational>& xc,
                                  const std::map<Exp, GaussianRational>& yc) {
        Exp deg = 1;
        for (const auto& [e, c] : xc) deg = std::max(deg, e);
        for (const auto& [e, c] : yc) deg = std::max(deg, e);
        BranchParam b{TruncatedSeries::from_coeffs(xc, deg), TruncatedSeries::from_coeffs(yc, deg), true};
        b.validate();
        return b;
    }

    void validate() const {
        if (!x.coeff(0).is_zero() || !y.coeff(0).is_zero())
            throw PreconditionError("branch components must have positive order");
        if (x.is_zero_to_prec() && y.is_zero_to_prec() && exact)
            throw PreconditionError("branch components must not both be zero");
    }

    Exp max_support() const {
        Exp m = 0;
        for (Exp e : x.support()) m = std::max(m, e);
        for (Exp e : y.support()) m = std::max(m, e);
        return m;
    }

    BranchParam conj() const { return {x.conj(), y.conj(), exact}; }
};

// Re-materialises an exact branch at precision >= p; truncates (or rejects)
// series-backed branches.
inline BranchParam materialize(const BranchParam& b, Exp p) {
    if (b.exact) {
        Exp target = std::max(p, b.max_support());
        return {TruncatedSeries::from_coeffs(b.x.coeffs(), target),
                TruncatedSeries::from_coeffs(b.y.coeffs(), target), true};
    }
    if (b.x.prec() < p || b.y.prec() < p)
        throw PrecisionExhausted("branch entries are known to lower precision than requested");
    return {b.x.truncated(p), b.y.truncated(p), false};
}

// --- elementary parametrization/coordinate changes -------------------------

// t -> rho(t), rho of order one; `exact` marks polynomial reparametrizations.
struct SourceReparam {
    TruncatedSeries rho;
    bool exact = false;
};
struct TargetScaleX {
    GaussianRational c; // x <- c * x
};
struct TargetScaleY {
    GaussianRational c; // y <- c * y
};
struct TargetShearX {
    BivariatePoly p; // x <- x + p(x, y)
};
struct TargetShearY {
    BivariatePoly p; // y <- y + p(x, y)
};
struct TargetSwapXY {};

using ChangeStep =
    std::variant<SourceReparam, TargetScaleX, TargetScaleY, TargetShearX, TargetShearY, TargetSwapXY>;

// Ordered list of elementary changes; replaying the log against the original
// parametrization reproduces the transformed one exactly up to precision.
struct ChangeLog {
    std::vector<ChangeStep> steps;

    void append(ChangeStep s) { steps.push_back(std::move(s)); }
    void append(const ChangeLog& other) {
        steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    }
    bool empty() const { return steps.empty(); }
};

namespace detail {

inline bool step_is_exact(const ChangeStep& s) {
    if (const auto* sr = std::get_if<SourceReparam>(&s)) return sr->exact;
    return true;
}

inline Exp poly_degree(const TruncatedSeries& s) {
    Exp d = 0;
    for (Exp e : s.support()) d = std::max(d, e);
    return d;
}

} // namespace detail

// Applies one elementary change.  For exact branches and exact steps the
// result stays exact: inputs are re-materialised at the degree bound of the
// result so no support is lost to truncation.
inline BranchParam apply_change(const ChangeStep& step, const BranchParam& b) {
    const bool exact = b.exact && detail::step_is_exact(step);
    if (const auto* sw = std::get_if<TargetSwapXY>(&step)) {
        (void)sw;
        return {b.y, b.x, b.exact};
    }
    if (const auto* sx = std::get_if<TargetScaleX>(&step)) {
        if (sx->c.is_zero()) throw PreconditionError("TargetScaleX: scale must be nonzero");
        return {b.x.scaled(sx->c), b.y, b.exact};
    }
    if (const auto* sy = std::get_if<TargetScaleY>(&step)) {
        if (sy->c.is_zero()) throw PreconditionError("TargetScaleY: scale must be nonzero");
        return {b.x, b.y.scaled(sy->c), b.exact};
    }
    if (const auto* sr = std::get_if<SourceReparam>(&step)) {
        if (sr->rho.order() != std::optional<Exp>(1))
            throw PreconditionError("SourceReparam: series must have order 1");
        BranchParam in = b;
        TruncatedSeries rho = sr->rho;
        if (exact) {
            Exp bound = std::max<Exp>(1, in.max_support() * std::max<Exp>(1, detail::poly_degree(rho)));
            in = materialize(in, bound);
            rho = TruncatedSeries::from_coeffs(rho.coeffs(), bound);
        }
        return {compose(in.x, rho), compose(in.y, rho), exact};
    }
    // shears
    const BivariatePoly* p = nullptr;
    bool on_x = false;
    if (const auto* shx = std::get_if<TargetShearX>(&step)) {
        p = &shx->p;
        on_x = true;
    } else {
        p = &std::get<TargetShearY>(step).p;
    }
    if (!p->coeff(0, 0).is_zero())
        throw PreconditionError("target shear polynomial must vanish at the origin");
    BranchParam in = b;
    Exp cap;
    if (exact) {
        Exp d = in.max_support();
        Exp bound = 1;
        for (const auto& [k, c] : p->terms())
            bound = std::max(bound, k.first * d + k.second * d);
        cap = std::max(bound, d);
        in = materialize(in, cap);
    } else {
        cap = std::min(in.x.prec(), in.y.prec());
    }
    TruncatedSeries val = eval_on_branch(*p, in.x, in.y, cap);
    if (on_x) return {in.x.truncated(std::min(in.x.prec(), val.prec())) + val, in.y, exact};
    return {in.x, in.y.truncated(std::min(in.y.prec(), val.prec())) + val, exact};
}

inline BranchParam apply_changes(const ChangeLog& log, BranchParam b) {
    for (const ChangeStep& s : log.steps) b = apply_change(s, b);
    return b;
}

// Substitutes t^d -> t when all exponents share a common divisor d > 1, so
// that the resulting parametrization is primitive.
inline BranchParam primitive_reduce(const BranchParam& b) {
    b.validate();
    Exp d = 0;
    for (Exp e : b.x.support()) d = std::gcd(d, e);
    for (Exp e : b.y.support()) d = std::gcd(d, e);
    if (d <= 1) return b;
    auto remap = [&](const TruncatedSeries& s) {
        std::map<Exp, GaussianRational> m;
        for (const auto& [e, c] : s.coeffs()) m.emplace(e / d, c);
        return TruncatedSeries::from_coeffs(m, s.prec() / d);
    };
    return {remap(b.x), remap(b.y), b.exact};
}

// A branch brought to the shape (t^v0, y): the first component is exactly
// t^v0 up to prec, the least y-exponent v1 satisfies v0 < v1, v0 does not
// divide v1, and the coefficient at v1 is 1.  Smooth branches (v0 = 1) are
// reduced to (t, 0) and flagged.
struct NormalizedBranch {
    std::int64_t v0 = 0;
    TruncatedSeries y;
    ChangeLog witness;
    bool smooth = false;

    Exp prec() const { return y.prec(); }

    std::int64_t v1() const {
        auto o = y.order();
        if (!o) throw PreconditionError("v1 undefined: branch is smooth or y vanishes to precision");
        return *o;
    }

    std::map<Exp, GaussianRational> ycoeffs() const { return y.coeffs(); }

    TruncatedSeries x_series() const {
        return TruncatedSeries::monomial(v0, GaussianRational(1), y.prec());
    }

    BranchParam as_branch() const { return {x_series(), y, false}; }
};

// Normalizes a primitive branch at the given working precision.  All steps
// stay inside Q(i): the leading coefficient of x is absorbed by a target
// scale, the unit part of x by a source reparametrization built from
// unit_root and comp_inverse, and the v1 coefficient by a target scale.
inline NormalizedBranch normalize(const BranchParam& input, Exp prec) {
    BranchParam b = materialize(input, prec);
    b.validate();
    ChangeLog log;

    auto ox = b.x.order(), oy = b.y.order();
    if (!ox && !oy) throw PrecisionExhausted("both branch components vanish to precision");
    if (!ox || (oy && *oy < *ox)) {
        std::swap(b.x, b.y);
        std::swap(ox, oy);
        log.append(TargetSwapXY{});
    }
    const std::int64_t v0 = *ox;

    GaussianRational lc = b.x.coeff(v0);
    if (!lc.is_one()) {
        GaussianRational inv = lc.inverse();
        log.append(TargetScaleX{inv});
        b.x = b.x.scaled(inv);
    }

    bool monomial_x = b.x.support() == std::vector<Exp>{v0};
    if (!monomial_x) {
        TruncatedSeries unit = b.x.shifted(-v0);
        TruncatedSeries root = unit_root(unit, static_cast<unsigned>(v0)).shifted(1);
        TruncatedSeries rho = comp_inverse(root);
        log.append(SourceReparam{rho, false});
        TruncatedSeries xr = compose(b.x, rho);
        if (xr.support() != std::vector<Exp>{v0})
            throw Error("internal: source reparametrization failed to straighten x");
        b.x = xr;
        b.y = compose(b.y, rho);
    }

    NormalizedBranch nb;
    nb.v0 = v0;

    if (v0 == 1) {
        // Smooth branch: y is a function of x; shear it away entirely.
        BivariatePoly p;
        for (const auto& [e, c] : b.y.coeffs()) p.add_term(e, 0, -c);
        if (!p.is_zero()) {
            log.append(TargetShearY{p});
            b.y = TruncatedSeries::zero(std::min(b.x.prec(), b.y.prec()));
        }
        nb.smooth = true;
        nb.y = b.y;
        nb.witness = log;
        return nb;
    }

    for (;;) {
        auto o = b.y.order();
        if (!o) throw PrecisionExhausted("cannot locate v1 within the working precision");
        if (*o % v0 != 0) break;
        GaussianRational c = b.y.coeff(*o);
        BivariatePoly p = BivariatePoly::monomial(*o / v0, 0, -c);
        log.append(TargetShearY{p});
        b.y = b.y - TruncatedSeries::monomial(*o, c, b.y.prec());
    }

    const Exp v1 = *b.y.order();
    GaussianRational lcy = b.y.coeff(v1);
    if (!lcy.is_one()) {
        GaussianRational inv = lcy.inverse();
        log.append(TargetScaleY{inv});
        b.y = b.y.scaled(inv);
    }

    nb.y = b.y.truncated(std::min(b.x.prec(), b.y.prec()));
    nb.witness = log;
    return nb;
}

} // namespace curvesing
