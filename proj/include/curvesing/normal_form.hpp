#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvesing/branch.hpp"
#include "curvesing/value_sets.hpp"

namespace curvesing {

// Canonical data of a singular branch after elimination: exponents of the
// reduced y-series inside the window (v1, conductor + v0), which the normal
// form theorem confines to {lambda} plus the exponents s with s + v0 outside
// the differential value set.  `lambda` empty means the branch is equivalent
// to the monomial parametrization (t^v0, t^v1).
struct NormalFormData {
    std::int64_t v0 = 0;
    std::int64_t v1 = 0;
    std::optional<std::int64_t> lambda;
    std::map<Exp, GaussianRational> coeffs;
    ChangeLog witness; // from the normalized branch to the reduced one
    bool lambda_normalized = false;
    Semigroup gamma;
    ValueSet lambda_values;
    Exp prec = 0;

    bool monomial_class() const { return !lambda.has_value(); }
    Exp window_end() const { return gamma.conductor + v0; }
};

namespace detail {

inline NormalizedBranch as_normalized(std::int64_t v0, const TruncatedSeries& y) {
    NormalizedBranch nb;
    nb.v0 = v0;
    nb.y = y;
    return nb;
}

} // namespace detail

// Reduces a normalized singular branch to its normal form.  Every removable
// exponent s (those with s + v0 in the differential value set, except the
// Zariski exponent itself) is cleared in increasing order: exponents whose
// value lies in the semigroup fall to a target shear along an algebra basis
// element; the rest take a combined change assembled from a differential
// basis element (two shears and a source reparametrization restoring
// x = t^v0).  Basis representatives are evaluated freshly on the current
// branch and the closures are recomputed when a representative's order
// drifts, so every kill is exact.
inline NormalFormData eliminate(const BranchAnalysis& a) {
    if (a.smooth) throw PreconditionError("eliminate: branch must be singular");
    if (!a.lambda) throw PreconditionError("eliminate: differential values missing");

    const std::int64_t v0 = a.nb.v0;
    const std::int64_t v1 = a.nb.v1();
    const Semigroup& sg = a.gamma.sg;
    const ValueSet& lv = a.lambda->values;
    const Exp window_end = sg.conductor + v0;
    const std::optional<std::int64_t> lambda = a.zariski;

    TruncatedSeries y = a.nb.y;
    const Exp cap = y.prec();
    ChangeLog log;

    const SemigroupClosure* scp = &a.gamma;
    const DifferentialClosure* dcp = &*a.lambda;
    std::optional<SemigroupClosure> sc_fresh;
    std::optional<DifferentialClosure> dc_fresh;
    auto rebuild = [&] {
        NormalizedBranch cur = detail::as_normalized(v0, y);
        sc_fresh = semigroup_closure(cur, sg.bound);
        dc_fresh = differential_closure(cur, *sc_fresh, lv.bound - 1);
        scp = &*sc_fresh;
        dcp = &*dc_fresh;
    };

    auto x_series = [&] { return TruncatedSeries::monomial(v0, GaussianRational(1), y.prec()); };

    auto removable = [&](Exp s) { return sg.contains(s) || lv.contains(s + v0); };

    // Clears the coefficient at s by a single target shear along an algebra
    // element of order s; affects no exponent below s.
    auto shear_step = [&](Exp s) {
        auto it = scp->basis.find(s);
        if (it == scp->basis.end()) {
            rebuild();
            it = scp->basis.find(s);
            if (it == scp->basis.end())
                throw EliminationStuck("no algebra element at a semigroup order");
        }
        TruncatedSeries val = eval_on_branch(it->second.poly, x_series(), y, cap);
        auto o = val.order();
        if (!o || *o != s) {
            rebuild();
            it = scp->basis.find(s);
            if (it == scp->basis.end())
                throw EliminationStuck("no algebra element at a semigroup order");
            val = it->second.series;
            o = val.order();
            if (!o || *o != s) throw EliminationStuck("algebra basis element lost its order");
        }
        GaussianRational c = y.coeff(s) / val.coeff(s);
        y = y - val.scaled(c);
        log.append(TargetShearY{it->second.poly.scaled(-c)});
    };

    // Clears the coefficient at s (s outside the semigroup, s + v0 inside the
    // value set) via the differential witness (eta, xi): target shears
    // y <- y - c eta, x <- x + c xi followed by the source change restoring
    // x = t^v0.  First-order effect lands exactly at s; residual spill is
    // re-cleared by the inner loop.
    auto module_step = [&](Exp s) {
        const Exp target_order = s + v0 - 1;
        auto fetch = [&]() -> const ModuleElement* {
            auto it = dcp->basis.find(target_order);
            return it == dcp->basis.end() ? nullptr : &it->second;
        };
        for (int iter = 0; iter < 32; ++iter) {
            GaussianRational ws = y.coeff(s);
            if (ws.is_zero()) return;
            const ModuleElement* m = fetch();
            if (!m) {
                rebuild();
                m = fetch();
                if (!m) throw EliminationStuck("no differential element at a value-set order");
            }
            TruncatedSeries xprime = TruncatedSeries::monomial(v0 - 1, GaussianRational(v0), cap - 1);
            TruncatedSeries etaval = eval_on_branch(m->eta, x_series(), y, cap);
            TruncatedSeries xival = eval_on_branch(m->xi, x_series(), y, cap);
            TruncatedSeries w = TruncatedSeries::mul_capped(etaval, xprime, cap) +
                                TruncatedSeries::mul_capped(xival, y.derivative(), cap);
            auto o = w.order();
            if (!o || *o != target_order) {
                rebuild();
                m = fetch();
                if (!m) throw EliminationStuck("no differential element at a value-set order");
                w = m->w;
                etaval = eval_on_branch(m->eta, x_series(), y, cap);
                xival = eval_on_branch(m->xi, x_series(), y, cap);
                o = w.order();
                if (!o || *o != target_order)
                    throw EliminationStuck("differential basis element lost its order");
            }
            if (!m->eta.coeff(0, 0).is_zero() || !m->xi.coeff(0, 0).is_zero())
                throw EliminationStuck("differential witness does not vanish at the origin");
            GaussianRational ell = w.coeff(target_order);
            GaussianRational c = GaussianRational(v0) * ws / ell;

            ChangeStep sy = TargetShearY{m->eta.scaled(-c)};
            ChangeStep sx = TargetShearX{m->xi.scaled(c)};
            BranchParam cur{x_series(), y, false};
            cur = apply_change(sy, cur);
            cur = apply_change(sx, cur);
            log.append(sy);
            log.append(sx);
            if (cur.x.support() != std::vector<Exp>{static_cast<Exp>(v0)}) {
                auto root = nth_root(cur.x, static_cast<unsigned>(v0));
                if (!root)
                    throw EliminationStuck(
                        "restoring x = t^v0 requires a scalar root outside Q(i)");
                TruncatedSeries rho = comp_inverse(*root);
                ChangeStep sr = SourceReparam{rho, false};
                cur = apply_change(sr, cur);
                log.append(sr);
                if (cur.x.support() != std::vector<Exp>{static_cast<Exp>(v0)})
                    throw EliminationStuck("source change failed to restore x = t^v0");
            }
            y = cur.y;
        }
        throw EliminationStuck("residual coefficient at exponent " + std::to_string(s) +
                               " did not clear");
    };

    for (int sweep = 0;; ++sweep) {
        if (sweep >= 8) throw EliminationStuck("elimination sweeps did not stabilise");
        for (Exp s = v1 + 1; s < window_end && s <= y.prec(); ++s) {
            if (lambda && s == *lambda) continue;
            if (y.coeff(s).is_zero()) continue;
            if (!removable(s)) continue;
            if (sg.contains(s))
                shear_step(s);
            else
                module_step(s);
        }

        // Re-establish the normalized shape in case a combined change spilled
        // low: clear v0-divisible exponents below v1 and rescale the leading
        // y-coefficient.
        bool reshaped = false;
        for (;;) {
            auto o = y.order();
            if (!o) throw EliminationStuck("y vanished during elimination");
            if (*o == v1) break;
            if (*o > v1 || *o % v0 != 0)
                throw EliminationStuck("elimination destroyed the normalized shape");
            GaussianRational c = y.coeff(*o);
            log.append(TargetShearY{BivariatePoly::monomial(*o / v0, 0, -c)});
            y = y - TruncatedSeries::monomial(*o, c, y.prec());
            reshaped = true;
        }
        GaussianRational lead = y.coeff(v1);
        if (!lead.is_one()) {
            GaussianRational inv = lead.inverse();
            log.append(TargetScaleY{inv});
            y = y.scaled(inv);
            reshaped = true;
        }

        bool clean = true;
        for (Exp s = v1 + 1; s < window_end && s <= y.prec(); ++s) {
            if (lambda && s == *lambda) continue;
            if (!y.coeff(s).is_zero() && removable(s)) {
                clean = false;
                break;
            }
        }
        if (clean && !reshaped) break;
        if (clean && reshaped) {
            // One more scan with the reshaped series before concluding.
            bool still_clean = true;
            for (Exp s = v1 + 1; s < window_end && s <= y.prec(); ++s) {
                if (lambda && s == *lambda) continue;
                if (!y.coeff(s).is_zero() && removable(s)) {
                    still_clean = false;
                    break;
                }
            }
            if (still_clean) break;
        }
        rebuild();
    }

    // Optional normalization of the coefficient at the Zariski exponent to 1;
    // the required root generally leaves Q(i), in which case the orbit
    // comparison copes with the unnormalized representative.
    bool lambda_normalized = false;
    if (lambda) {
        GaussianRational wl = y.coeff(*lambda);
        if (wl.is_zero())
            throw EliminationStuck("coefficient at the Zariski exponent vanished");
        if (wl.is_one()) {
            lambda_normalized = true;
        } else {
            unsigned d = static_cast<unsigned>(*lambda - v1);
            if (auto zeta = nth_root(wl.inverse(), d)) {
                BranchParam cur{x_series(), y, false};
                ChangeStep sr = SourceReparam{
                    TruncatedSeries::monomial(1, *zeta, y.prec()), true};
                ChangeStep cx = TargetScaleX{zeta->pow(-static_cast<long>(v0))};
                ChangeStep cy = TargetScaleY{zeta->pow(-static_cast<long>(v1))};
                cur = apply_change(sr, cur);
                cur = apply_change(cx, cur);
                cur = apply_change(cy, cur);
                log.append(sr);
                log.append(cx);
                log.append(cy);
                y = cur.y;
                if (!y.coeff(*lambda).is_one())
                    throw Error("internal: lambda normalization failed");
                lambda_normalized = true;
            }
        }
    }

    NormalFormData nf;
    nf.v0 = v0;
    nf.v1 = v1;
    nf.lambda = lambda;
    nf.witness = log;
    nf.lambda_normalized = lambda_normalized;
    nf.gamma = sg;
    nf.lambda_values = lv;
    nf.prec = y.prec();
    for (const auto& [e, c] : y.coeffs()) {
        if (e <= v1 || e >= window_end) continue;
        nf.coeffs.emplace(e, c);
    }
    for (const auto& [e, c] : nf.coeffs) {
        bool allowed = (lambda && e == *lambda) || !lv.contains(e + v0);
        if (!allowed) throw Error("internal: normal-form support touches removable exponents");
    }
    if (nf.monomial_class() && !nf.coeffs.empty())
        throw Error("internal: monomial class with residual coefficients");
    return nf;
}

inline NormalFormData eliminate(const BranchParam& b) { return eliminate(analyze(b)); }

// Certificate for the residual scaling action a_i -> r^(i - v1) a_i on
// normal-form coefficients: g = gcd of the exponents i - v1 over the support,
// ratio_power = r^g obtained from a Bezout combination of the coefficient
// ratios, and the combination itself.  `ratio` carries r when it lies in
// Q(i).
struct ScalingCertificate {
    std::int64_t g = 1;
    GaussianRational ratio_power = GaussianRational(1);
    std::vector<std::pair<std::int64_t, std::int64_t>> bezout; // (exponent, coefficient)
    std::optional<GaussianRational> ratio;
};

struct OrbitDecision {
    bool equal = false;
    std::optional<ScalingCertificate> certificate;
    std::optional<std::int64_t> failing_exponent;
    std::string reason;
};

// Decides whether two normal forms lie in one orbit of the scaling action,
// i.e. whether some r in C* satisfies a_i = r^(i-v1) a'_i for every support
// exponent (the constraint r^(lambda-v1) = 1 is the lambda-exponent instance
// once both representatives carry their lambda coefficient).
inline OrbitDecision scaling_orbit_equal(const NormalFormData& n1, const NormalFormData& n2) {
    OrbitDecision out;
    if (n1.v0 != n2.v0 || n1.v1 != n2.v1) {
        out.reason = "multiplicity pair differs";
        return out;
    }
    if (n1.monomial_class() != n2.monomial_class()) {
        out.reason = "only one side is in the monomial class";
        return out;
    }
    if (n1.monomial_class()) {
        out.equal = true;
        out.certificate = ScalingCertificate{1, GaussianRational(1), {}, GaussianRational(1)};
        return out;
    }
    if (*n1.lambda != *n2.lambda) {
        out.reason = "Zariski invariants differ";
        return out;
    }
    if (!(n1.lambda_values == n2.lambda_values)) {
        out.reason = "differential value sets differ";
        return out;
    }

    auto it1 = n1.coeffs.begin();
    auto it2 = n2.coeffs.begin();
    std::vector<std::pair<std::int64_t, GaussianRational>> ratios;
    while (it1 != n1.coeffs.end() || it2 != n2.coeffs.end()) {
        if (it1 == n1.coeffs.end() || it2 == n2.coeffs.end() || it1->first != it2->first) {
            out.failing_exponent =
                it1 == n1.coeffs.end()
                    ? it2->first
                    : (it2 == n2.coeffs.end() ? it1->first : std::min(it1->first, it2->first));
            out.reason = "normal-form supports differ";
            return out;
        }
        ratios.emplace_back(it1->first - n1.v1, it1->second / it2->second);
        ++it1;
        ++it2;
    }

    ScalingCertificate cert;
    std::int64_t g = 0;
    GaussianRational R(1);
    std::map<std::int64_t, std::int64_t> combo; // exponent -> Bezout coefficient
    for (const auto& [e, rho] : ratios) {
        if (g == 0) {
            g = e;
            R = rho;
            combo = {{e, 1}};
            continue;
        }
        std::int64_t old_g = g;
        std::int64_t u, v;
        // extended gcd: u*old_g + v*e = gcd
        {
            std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1, r0 = old_g, r1 = e;
            while (r1 != 0) {
                std::int64_t q = r0 / r1;
                std::int64_t tmp = r0 - q * r1;
                r0 = r1;
                r1 = tmp;
                tmp = s0 - q * s1;
                s0 = s1;
                s1 = tmp;
                tmp = t0 - q * t1;
                t0 = t1;
                t1 = tmp;
            }
            g = r0;
            u = s0;
            v = t0;
        }
        GaussianRational Rn = R.pow(u) * rho.pow(v);
        std::map<std::int64_t, std::int64_t> next;
        for (const auto& [exp, cv] : combo) next[exp] = cv * u;
        next[e] += v;
        combo = std::move(next);
        R = Rn;
    }
    if (g == 0) g = 1; // no constraints at all

    for (const auto& [e, rho] : ratios) {
        if (R.pow(e / g) != rho) {
            out.failing_exponent = e + n1.v1;
            out.reason = "coefficient ratios admit no common scaling";
            return out;
        }
    }

    cert.g = g;
    cert.ratio_power = R;
    for (const auto& [exp, cv] : combo)
        if (cv != 0) cert.bezout.emplace_back(exp, cv);
    if (g == 1) {
        cert.ratio = R;
    } else {
        cert.ratio = nth_root(R, static_cast<unsigned>(g));
    }
    out.equal = true;
    out.certificate = std::move(cert);
    return out;
}

struct EquivalenceCertificate {
    ChangeLog left, right; // input branch (primitive-reduced) -> reduced form
    Exp left_prec = 0, right_prec = 0;
    std::int64_t v0 = 0, v1 = 0;
    Exp window_end = 0;
    ScalingCertificate scaling;
};

struct EquivalenceDecision {
    bool equivalent = false;
    std::string reason;
    std::optional<EquivalenceCertificate> certificate;
};

namespace detail {

inline std::map<Exp, GaussianRational> window_coeffs(const TruncatedSeries& y, Exp v1, Exp end) {
    std::map<Exp, GaussianRational> m;
    for (const auto& [e, c] : y.coeffs())
        if (e > v1 && e < end) m.emplace(e, c);
    return m;
}

} // namespace detail

// Full analytic-equivalence decision from precomputed analyses and normal
// forms (the caller may cache these across pairwise comparisons).
inline EquivalenceDecision analytic_equivalent_reduced(const BranchAnalysis& a1,
                                                       const NormalFormData& n1,
                                                       const BranchAnalysis& a2,
                                                       const NormalFormData& n2) {
    EquivalenceDecision out;
    if (a1.gamma.sg.generators != a2.gamma.sg.generators ||
        a1.gamma.sg.conductor != a2.gamma.sg.conductor) {
        out.reason = "semigroups differ";
        return out;
    }
    if (a1.char_exps != a2.char_exps) {
        out.reason = "characteristic exponents differ";
        return out;
    }
    if (!(a1.lambda->values == a2.lambda->values)) {
        out.reason = "differential value sets differ";
        return out;
    }
    if (a1.zariski != a2.zariski) {
        out.reason = "Zariski invariants differ";
        return out;
    }
    OrbitDecision orbit = scaling_orbit_equal(n1, n2);
    if (!orbit.equal) {
        out.reason = orbit.reason;
        return out;
    }
    EquivalenceCertificate cert;
    cert.left = a1.nb.witness;
    cert.left.append(n1.witness);
    cert.right = a2.nb.witness;
    cert.right.append(n2.witness);
    cert.left_prec = a1.nb.prec() + a1.nb.v0 - 1;
    cert.right_prec = a2.nb.prec() + a2.nb.v0 - 1;
    cert.v0 = n1.v0;
    cert.v1 = n1.v1;
    cert.window_end = std::min(n1.window_end(), n2.window_end());
    cert.scaling = *orbit.certificate;
    out.equivalent = true;
    out.certificate = std::move(cert);
    return out;
}

inline EquivalenceDecision analytic_equivalent(const BranchParam& b1, const BranchParam& b2,
                                               std::optional<Exp> precision = {}) {
    BranchAnalysis a1 = analyze(b1, precision);
    BranchAnalysis a2 = analyze(b2, precision);
    if (a1.smooth || a2.smooth) throw UnsupportedSmoothBranches();
    NormalFormData n1 = eliminate(a1);
    NormalFormData n2 = eliminate(a2);
    return analytic_equivalent_reduced(a1, n1, a2, n2);
}

// Replays both logs of a certificate and checks the scaling relation between
// the two reduced windows coefficient by coefficient.
inline bool verify_equivalence_certificate(const BranchParam& b1, const BranchParam& b2,
                                           const EquivalenceCertificate& cert) {
    BranchParam r1 = apply_changes(cert.left, materialize(primitive_reduce(b1), cert.left_prec));
    BranchParam r2 = apply_changes(cert.right, materialize(primitive_reduce(b2), cert.right_prec));
    std::vector<Exp> expect{static_cast<Exp>(cert.v0)};
    if (r1.x.support() != expect || r2.x.support() != expect) return false;
    auto w1 = detail::window_coeffs(r1.y, cert.v1, cert.window_end);
    auto w2 = detail::window_coeffs(r2.y, cert.v1, cert.window_end);
    if (w1.size() != w2.size()) return false;
    auto i1 = w1.begin();
    auto i2 = w2.begin();
    const auto& sc = cert.scaling;
    for (; i1 != w1.end(); ++i1, ++i2) {
        if (i1->first != i2->first) return false;
        std::int64_t e = i1->first - cert.v1;
        if (e % sc.g != 0) return false;
        if (i1->second != sc.ratio_power.pow(e / sc.g) * i2->second) return false;
    }
    return true;
}

inline BranchParam conjugate_branch(const BranchParam& b) { return b.conj(); }

} // namespace curvesing
