#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "curvesing/branch.hpp"

namespace curvesing {

// Finite description of a numerical semigroup: the explicit members in
// [0, bound] together with the guarantee that every integer >= bound belongs.
struct Semigroup {
    std::int64_t v0 = 0;
    std::vector<std::int64_t> members; // sorted, within [0, bound]
    std::int64_t conductor = 0;
    std::vector<std::int64_t> generators;
    std::int64_t bound = 0;

    bool contains(std::int64_t m) const {
        if (m < 0) return false;
        if (m >= bound) return true;
        return std::binary_search(members.begin(), members.end(), m);
    }

    friend bool operator==(const Semigroup& a, const Semigroup& b) {
        return a.v0 == b.v0 && a.members == b.members && a.conductor == b.conductor &&
               a.generators == b.generators && a.bound == b.bound;
    }
};

// Window of a value set: explicit members in [1, bound], all integers >=
// bound guaranteed to belong.
struct ValueSet {
    std::vector<std::int64_t> members;
    std::int64_t bound = 0;

    bool contains(std::int64_t m) const {
        if (m < 1) return false;
        if (m >= bound) return true;
        return std::binary_search(members.begin(), members.end(), m);
    }

    friend bool operator==(const ValueSet& a, const ValueSet& b) {
        return a.members == b.members && a.bound == b.bound;
    }
};

// Basis element of the coordinate algebra along the branch: a polynomial
// representative and its (monic) pullback series.
struct AlgebraElement {
    BivariatePoly poly;
    TruncatedSeries series;
};

struct SemigroupClosure {
    Semigroup sg;
    std::map<Exp, AlgebraElement> basis; // order -> monic element
};

// Basis element of the differential module along the branch: polynomials
// (eta, xi) and the series eta(g)·x' + xi(g)·y'.
struct ModuleElement {
    BivariatePoly eta, xi;
    TruncatedSeries w;
};

struct DifferentialClosure {
    ValueSet values;
    std::map<Exp, ModuleElement> basis; // order of w -> monic element
};

// Characteristic exponents by gcd descent on the support of the normalized
// second component.
inline std::vector<std::int64_t> char_exponents(const NormalizedBranch& nb) {
    if (nb.smooth) return {1};
    std::vector<std::int64_t> beta{nb.v0};
    std::int64_t e = nb.v0;
    for (Exp s : nb.y.support()) {
        if (e == 1) break;
        if (s % e != 0) {
            beta.push_back(s);
            e = std::gcd(e, s);
        }
    }
    if (e != 1)
        throw NotFinitelyDetermined("gcd descent on the y-support did not reach 1 within precision");
    return beta;
}

// Conductor from characteristic exponents: sum (e_{q-1} - e_q) beta_q - beta_0 + 1.
inline std::int64_t conductor_from_char(const std::vector<std::int64_t>& beta) {
    std::int64_t e = beta[0];
    std::int64_t c = 1 - beta[0];
    for (std::size_t q = 1; q < beta.size(); ++q) {
        std::int64_t e2 = std::gcd(e, beta[q]);
        c += (e - e2) * beta[q];
        e = e2;
    }
    return c;
}

// Order closure of the algebra generated by the two coordinates along the
// branch.  Maintains a basis indexed by vanishing order; inserting an element
// whose order is occupied subtracts the scaled basis element and re-inserts
// the remainder; products of new basis elements are queued until the window
// [0, bound] stabilises.
inline SemigroupClosure semigroup_closure(const NormalizedBranch& nb, Exp bound) {
    if (nb.smooth) throw PreconditionError("semigroup_closure: branch must be singular");
    const Exp cap = nb.prec();
    if (bound > cap) throw PrecisionExhausted("semigroup window exceeds working precision");

    std::map<Exp, AlgebraElement> basis;
    std::vector<AlgebraElement> pending;
    pending.push_back({BivariatePoly::variable_x(), nb.x_series()});
    pending.push_back({BivariatePoly::variable_y(), nb.y});

    while (!pending.empty()) {
        AlgebraElement el = std::move(pending.back());
        pending.pop_back();
        for (;;) {
            auto o = el.series.order();
            if (!o) {
                if (el.series.prec() >= bound) break;
                throw PrecisionExhausted("closure element vanished inside the precision window");
            }
            if (*o > bound) break;
            auto it = basis.find(*o);
            if (it == basis.end()) {
                GaussianRational inv = el.series.coeff(*o).inverse();
                el.series = el.series.scaled(inv);
                el.poly = el.poly.scaled(inv);
                for (const auto& [o2, e2] : basis) {
                    if (*o + o2 <= bound)
                        pending.push_back({el.poly * e2.poly,
                                           TruncatedSeries::mul_capped(el.series, e2.series, cap)});
                }
                if (2 * *o <= bound)
                    pending.push_back({el.poly * el.poly,
                                       TruncatedSeries::mul_capped(el.series, el.series, cap)});
                basis.emplace(*o, std::move(el));
                break;
            }
            GaussianRational c = el.series.coeff(*o); // basis entries are monic
            el.series = el.series - it->second.series.scaled(c);
            el.poly = el.poly - it->second.poly.scaled(c);
        }
    }

    Semigroup sg;
    sg.v0 = nb.v0;
    sg.bound = bound;
    sg.members.push_back(0);
    for (const auto& [o, e] : basis) sg.members.push_back(o);

    std::vector<char> in(static_cast<std::size_t>(bound) + 1, 0);
    for (std::int64_t m : sg.members)
        if (m <= bound) in[static_cast<std::size_t>(m)] = 1;

    std::int64_t conductor = -1;
    for (std::int64_t s = 0; s + nb.v0 - 1 <= bound; ++s) {
        bool run = true;
        for (std::int64_t k = 0; k < nb.v0; ++k)
            if (!in[static_cast<std::size_t>(s + k)]) {
                run = false;
                break;
            }
        if (run) {
            conductor = s;
            break;
        }
    }
    if (conductor < 0)
        throw PrecisionExhausted("no run of v0 consecutive members inside the window");
    for (std::int64_t m = conductor; m <= bound; ++m)
        if (!in[static_cast<std::size_t>(m)])
            throw Error("internal: semigroup window has a gap past the conductor");
    sg.conductor = conductor;

    for (std::int64_t m : sg.members) {
        if (m == 0) continue;
        bool sum = false;
        for (std::int64_t a : sg.members) {
            if (a == 0) continue;
            if (a >= m) break;
            if (in[static_cast<std::size_t>(m - a)]) {
                sum = true;
                break;
            }
        }
        if (!sum) sg.generators.push_back(m);
    }

    return {std::move(sg), std::move(basis)};
}

// Staircase closure of the module generated by x' and y' over the coordinate
// algebra.  Seeds are algebra basis elements times the two derivatives; the
// span of the seeds covers the module inside the window, so only linear
// reduction (no products) is needed.
inline DifferentialClosure differential_closure(const NormalizedBranch& nb,
                                                const SemigroupClosure& sc, Exp module_bound) {
    if (nb.smooth) throw PreconditionError("differential_closure: branch must be singular");
    const Exp value_bound = module_bound + 1;
    if (nb.prec() < 2 * value_bound)
        throw PrecisionExhausted("differential closure requires working precision >= 2(c + v0)");

    TruncatedSeries xprime =
        TruncatedSeries::monomial(nb.v0 - 1, GaussianRational(nb.v0), nb.prec() - 1);
    TruncatedSeries yprime = nb.y.derivative();

    std::map<Exp, ModuleElement> basis;
    std::vector<ModuleElement> pending;

    auto seed = [&](const BivariatePoly& poly, const TruncatedSeries& ser) {
        auto o = ser.order();
        if (!o) return;
        if (*o + nb.v0 - 1 <= module_bound)
            pending.push_back({poly, BivariatePoly{},
                               TruncatedSeries::mul_capped(ser, xprime, module_bound)});
        if (*o + nb.v1() - 1 <= module_bound)
            pending.push_back({BivariatePoly{}, poly,
                               TruncatedSeries::mul_capped(ser, yprime, module_bound)});
    };

    seed(BivariatePoly::constant(GaussianRational(1)), TruncatedSeries::one(nb.prec()));
    for (const auto& [g, el] : sc.basis) seed(el.poly, el.series);

    while (!pending.empty()) {
        ModuleElement el = std::move(pending.back());
        pending.pop_back();
        for (;;) {
            auto o = el.w.order();
            if (!o) {
                if (el.w.prec() >= module_bound) break;
                throw PrecisionExhausted("module element vanished inside the precision window");
            }
            if (*o > module_bound) break;
            auto it = basis.find(*o);
            if (it == basis.end()) {
                GaussianRational inv = el.w.coeff(*o).inverse();
                el.w = el.w.scaled(inv);
                el.eta = el.eta.scaled(inv);
                el.xi = el.xi.scaled(inv);
                basis.emplace(*o, std::move(el));
                break;
            }
            GaussianRational c = el.w.coeff(*o);
            el.w = el.w - it->second.w.scaled(c);
            el.eta = el.eta - it->second.eta.scaled(c);
            el.xi = el.xi - it->second.xi.scaled(c);
        }
    }

    ValueSet vs;
    vs.bound = value_bound;
    for (const auto& [o, e] : basis) vs.members.push_back(o + 1);
    if (vs.members.empty() || vs.members.back() != value_bound)
        throw Error("internal: differential window is missing its guaranteed endpoint");
    return {std::move(vs), std::move(basis)};
}

// min(Lambda \ Gamma) - v0, or nullopt for the monomial class.  Every element
// of Lambda \ Gamma is below the conductor, so the window decides this.
inline std::optional<std::int64_t> zariski_from(const Semigroup& sg, const ValueSet& vs) {
    for (std::int64_t m : vs.members)
        if (!sg.contains(m)) return m - sg.v0;
    return std::nullopt;
}

inline Semigroup smooth_semigroup() {
    Semigroup sg;
    sg.v0 = 1;
    sg.conductor = 0;
    sg.generators = {1};
    sg.bound = 2;
    sg.members = {0, 1, 2};
    return sg;
}

// Full invariant bundle for one branch.
struct BranchAnalysis {
    BranchParam reduced;
    NormalizedBranch nb;
    SemigroupClosure gamma;
    std::vector<std::int64_t> char_exps;
    std::optional<DifferentialClosure> lambda; // absent for smooth branches
    std::optional<std::int64_t> zariski;       // engaged only when lambda \ gamma != {}
    bool monomial_class = false;
    bool smooth = false;
    Exp precision_used = 0;

    std::int64_t v0() const { return nb.v0; }
};

// Runs the whole invariant pipeline with the default working-precision
// policy: 2(c_estimate + v0) with the conductor estimated from the
// characteristic exponents, retrying with doubled precision on
// PrecisionExhausted at most three times.  An explicit precision override
// disables both the policy and the retries.
inline BranchAnalysis analyze(const BranchParam& input, std::optional<Exp> precision_override = {}) {
    BranchParam reduced = primitive_reduce(input);
    auto ox = reduced.x.order(), oy = reduced.y.order();
    if (!ox && !oy) throw PreconditionError("analyze: both components vanish");
    Exp v0_est = ox && oy ? std::min(*ox, *oy) : (ox ? *ox : *oy);

    Exp target = precision_override ? *precision_override
                                    : 2 * (std::max<Exp>(reduced.max_support(), 4) + v0_est + 2);
    int retries = 0;
    for (;;) {
        try {
            NormalizedBranch nb = normalize(reduced, target + v0_est - 1);

            BranchAnalysis out;
            out.reduced = reduced;
            out.precision_used = nb.prec();

            if (nb.smooth) {
                out.nb = std::move(nb);
                out.smooth = true;
                out.char_exps = {1};
                out.gamma = SemigroupClosure{smooth_semigroup(), {}};
                return out;
            }

            auto beta = char_exponents(nb);
            Exp c_est = conductor_from_char(beta);
            Exp needed = 2 * (c_est + nb.v0);
            if (!precision_override && nb.prec() < needed) {
                target = std::max<Exp>(needed, target + 1);
                continue;
            }

            Exp window = c_est + nb.v0;
            auto sc = semigroup_closure(nb, window);
            auto dc = differential_closure(nb, sc, window - 1);

            out.precision_used = nb.prec();
            out.char_exps = std::move(beta);
            out.zariski = zariski_from(sc.sg, dc.values);
            out.monomial_class = !out.zariski.has_value();
            out.nb = std::move(nb);
            out.gamma = std::move(sc);
            out.lambda = std::move(dc);
            return out;
        } catch (const PrecisionExhausted&) {
            if (precision_override) throw;
            if (++retries > 3) throw;
            target *= 2;
        } catch (const NotFinitelyDetermined&) {
            if (precision_override) throw;
            if (++retries > 3) throw;
            target *= 2;
        }
    }
}

// Spec-shaped conveniences computing their own windows.

inline Semigroup semigroup(const NormalizedBranch& nb) {
    if (nb.smooth) return smooth_semigroup();
    Exp c = conductor_from_char(char_exponents(nb));
    return semigroup_closure(nb, c + nb.v0).sg;
}

inline ValueSet differential_values(const NormalizedBranch& nb) {
    if (nb.smooth) throw PreconditionError("differential_values: branch must be singular");
    Exp c = conductor_from_char(char_exponents(nb));
    auto sc = semigroup_closure(nb, c + nb.v0);
    return differential_closure(nb, sc, c + nb.v0 - 1).values;
}

inline std::optional<std::int64_t> zariski_invariant(const NormalizedBranch& nb) {
    if (nb.smooth) throw PreconditionError("zariski_invariant: branch must be singular");
    Exp c = conductor_from_char(char_exponents(nb));
    auto sc = semigroup_closure(nb, c + nb.v0);
    auto dc = differential_closure(nb, sc, c + nb.v0 - 1);
    return zariski_from(sc.sg, dc.values);
}

} // namespace curvesing
