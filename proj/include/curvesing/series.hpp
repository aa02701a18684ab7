#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "curvesing/errors.hpp"
#include "curvesing/gaussian.hpp"

namespace curvesing {

// One-variable formal power series over Q(i) truncated at a stated precision:
// coefficients 0..prec() are exact, the tail O(t^{prec+1}) is unknown.
// Requesting a coefficient beyond prec() raises PrecisionError; unknown tails
// are never reported as zero.  Every operation computes the largest precision
// at which all coefficients of the true result are determined by the known
// coefficients of the inputs, and truncates there.
//
// Internally the known coefficients are Gaussian-integer numerators over one
// shared positive denominator, so ring operations stay in integer arithmetic;
// coeff()/coeffs() materialise the canonical per-exponent view.
class TruncatedSeries {
public:
    using Exp = std::int64_t;

    TruncatedSeries() : den_(1), prec_(0), has_im_(false) { alloc(); }

    static TruncatedSeries zero(Exp prec) {
        TruncatedSeries s;
        s.prec_ = check_prec(prec);
        s.alloc();
        return s;
    }

    static TruncatedSeries monomial(Exp e, const GaussianRational& c, Exp prec) {
        if (e < 0) throw PreconditionError("monomial: negative exponent");
        TruncatedSeries s = zero(prec);
        if (e <= prec && !c.is_zero()) s.set_coeff(e, c);
        return s;
    }

    // The series t.
    static TruncatedSeries identity(Exp prec) { return monomial(1, GaussianRational(1), prec); }
    static TruncatedSeries one(Exp prec) { return monomial(0, GaussianRational(1), prec); }

    static TruncatedSeries from_coeffs(const std::map<Exp, GaussianRational>& coeffs, Exp prec) {
        TruncatedSeries s = zero(prec);
        for (const auto& [e, c] : coeffs) {
            if (e < 0) throw PreconditionError("from_coeffs: negative exponent");
            if (e > prec) throw PrecisionError("from_coeffs: exponent beyond precision");
            if (!c.is_zero()) s.set_coeff(e, c);
        }
        return s;
    }

    Exp prec() const { return prec_; }

    // Least exponent with a nonzero coefficient; nullopt when every known
    // coefficient vanishes (zero to precision).
    std::optional<Exp> order() const {
        for (Exp e = 0; e <= prec_; ++e)
            if (!coeff_zero(e)) return e;
        return std::nullopt;
    }

    bool is_zero_to_prec() const { return !order().has_value(); }

    GaussianRational coeff(Exp e) const {
        if (e < 0) return GaussianRational();
        if (e > prec_) {
            throw PrecisionError("coefficient t^" + std::to_string(e) +
                                 " requested beyond precision " + std::to_string(prec_));
        }
        mpq_class re(re_[static_cast<std::size_t>(e)], den_);
        re.canonicalize();
        mpq_class im(im_[static_cast<std::size_t>(e)], den_);
        im.canonicalize();
        return {re, im};
    }

    GaussianRational leading_coeff() const {
        auto o = order();
        if (!o) throw PreconditionError("leading_coeff of a series that is zero to precision");
        return coeff(*o);
    }

    std::vector<Exp> support() const {
        std::vector<Exp> s;
        for (Exp e = 0; e <= prec_; ++e)
            if (!coeff_zero(e)) s.push_back(e);
        return s;
    }

    std::map<Exp, GaussianRational> coeffs() const {
        std::map<Exp, GaussianRational> m;
        for (Exp e : support()) m.emplace(e, coeff(e));
        return m;
    }

    TruncatedSeries truncated(Exp p) const {
        if (p > prec_) throw PrecisionError("cannot extend a truncated series");
        TruncatedSeries s = *this;
        s.prec_ = check_prec(p);
        s.re_.resize(static_cast<std::size_t>(p) + 1);
        s.im_.resize(static_cast<std::size_t>(p) + 1);
        s.rescan_im();
        return s;
    }

    // Multiplication by t^k (k may be negative if the order allows it).
    TruncatedSeries shifted(Exp k) const {
        TruncatedSeries s;
        if (k >= 0) {
            s.prec_ = prec_ + k;
            s.alloc();
            for (Exp e = 0; e <= prec_; ++e) {
                s.re_[static_cast<std::size_t>(e + k)] = re_[static_cast<std::size_t>(e)];
                s.im_[static_cast<std::size_t>(e + k)] = im_[static_cast<std::size_t>(e)];
            }
        } else {
            Exp m = -k;
            for (Exp e = 0; e < m && e <= prec_; ++e)
                if (!coeff_zero(e)) throw PreconditionError("shifted: order too small for negative shift");
            s.prec_ = check_prec(prec_ - m);
            s.alloc();
            for (Exp e = 0; e <= s.prec_; ++e) {
                s.re_[static_cast<std::size_t>(e)] = re_[static_cast<std::size_t>(e + m)];
                s.im_[static_cast<std::size_t>(e)] = im_[static_cast<std::size_t>(e + m)];
            }
        }
        s.den_ = den_;
        s.has_im_ = has_im_;
        return s;
    }

    TruncatedSeries conj() const {
        TruncatedSeries s = *this;
        for (auto& v : s.im_) v = -v;
        return s;
    }

    TruncatedSeries derivative() const {
        if (prec_ < 1) throw PrecisionError("derivative of a series known only to order 0");
        TruncatedSeries s = zero(prec_ - 1);
        s.den_ = den_;
        for (Exp e = 1; e <= prec_; ++e) {
            s.re_[static_cast<std::size_t>(e - 1)] = re_[static_cast<std::size_t>(e)] * e;
            s.im_[static_cast<std::size_t>(e - 1)] = im_[static_cast<std::size_t>(e)] * e;
        }
        s.rescan_im();
        s.reduce_if_heavy();
        return s;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries s = *this;
        for (auto& v : s.re_) v = -v;
        for (auto& v : s.im_) v = -v;
        return s;
    }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
        return add_sub(a, b, false);
    }
    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
        return add_sub(a, b, true);
    }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        return mul_capped(a, b, kNoCap);
    }

    TruncatedSeries scaled(const GaussianRational& c) const {
        TruncatedSeries s = zero(prec_);
        if (c.is_zero()) return s;
        mpz_class cr = c.real().get_num() * c.imag().get_den();
        mpz_class ci = c.imag().get_num() * c.real().get_den();
        mpz_class cd = c.real().get_den() * c.imag().get_den();
        s.den_ = den_ * cd;
        bool c_real = sgn(ci) == 0;
        for (Exp e = 0; e <= prec_; ++e) {
            auto idx = static_cast<std::size_t>(e);
            if (c_real && !has_im_) {
                s.re_[idx] = re_[idx] * cr;
            } else {
                s.re_[idx] = re_[idx] * cr - im_[idx] * ci;
                s.im_[idx] = re_[idx] * ci + im_[idx] * cr;
            }
        }
        s.rescan_im();
        s.reduce_if_heavy();
        return s;
    }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const GaussianRational& c) { return a.scaled(c); }
    friend TruncatedSeries operator*(const GaussianRational& c, const TruncatedSeries& a) { return a.scaled(c); }

    // Exact equality of the known coefficient ranges; precisions must agree.
    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
        return a.prec_ == b.prec_ && equal_up_to(a, b, a.prec_);
    }
    friend bool operator!=(const TruncatedSeries& a, const TruncatedSeries& b) { return !(a == b); }

    // Coefficientwise equality for exponents 0..p (p must be within both
    // precisions).
    static bool equal_up_to(const TruncatedSeries& a, const TruncatedSeries& b, Exp p) {
        if (p > a.prec_ || p > b.prec_)
            throw PrecisionError("equal_up_to: range exceeds known precision");
        for (Exp e = 0; e <= p; ++e) {
            auto idx = static_cast<std::size_t>(e);
            if (a.re_[idx] * b.den_ != b.re_[idx] * a.den_) return false;
            if (a.im_[idx] * b.den_ != b.im_[idx] * a.den_) return false;
        }
        return true;
    }

    // Product truncated at min(rule precision, cap); the rule precision is
    // min(prec_a + ord(b), prec_b + ord(a), prec_a + prec_b) with the order of
    // a series that vanishes to precision counted as prec+1.
    static TruncatedSeries mul_capped(const TruncatedSeries& a, const TruncatedSeries& b, Exp cap) {
        Exp p = std::min({a.prec_ + b.order_lower_bound(), b.prec_ + a.order_lower_bound(),
                          a.prec_ + b.prec_});
        p = std::min(p, cap);
        TruncatedSeries s = zero(p);
        s.den_ = a.den_ * b.den_;
        const bool real_only = !a.has_im_ && !b.has_im_;
        for (Exp i = 0; i <= std::min(a.prec_, p); ++i) {
            auto ia = static_cast<std::size_t>(i);
            const bool are = sgn(a.re_[ia]) != 0;
            const bool aim = a.has_im_ && sgn(a.im_[ia]) != 0;
            if (!are && !aim) continue;
            Exp jmax = std::min(b.prec_, p - i);
            if (real_only) {
                for (Exp j = 0; j <= jmax; ++j) {
                    auto jb = static_cast<std::size_t>(j);
                    if (sgn(b.re_[jb]) == 0) continue;
                    mpz_addmul(s.re_[static_cast<std::size_t>(i + j)].get_mpz_t(),
                               a.re_[ia].get_mpz_t(), b.re_[jb].get_mpz_t());
                }
            } else {
                for (Exp j = 0; j <= jmax; ++j) {
                    auto jb = static_cast<std::size_t>(j);
                    const bool bre = sgn(b.re_[jb]) != 0;
                    const bool bim = sgn(b.im_[jb]) != 0;
                    if (!bre && !bim) continue;
                    auto k = static_cast<std::size_t>(i + j);
                    if (are && bre) mpz_addmul(s.re_[k].get_mpz_t(), a.re_[ia].get_mpz_t(), b.re_[jb].get_mpz_t());
                    if (aim && bim) mpz_submul(s.re_[k].get_mpz_t(), a.im_[ia].get_mpz_t(), b.im_[jb].get_mpz_t());
                    if (are && bim) mpz_addmul(s.im_[k].get_mpz_t(), a.re_[ia].get_mpz_t(), b.im_[jb].get_mpz_t());
                    if (aim && bre) mpz_addmul(s.im_[k].get_mpz_t(), a.im_[ia].get_mpz_t(), b.re_[jb].get_mpz_t());
                }
            }
        }
        s.rescan_im();
        s.reduce_if_heavy();
        return s;
    }

    static constexpr Exp kNoCap = INT64_MAX / 4;

    // Min stored nonzero exponent, or prec+1 when zero to precision (a sound
    // lower bound on the true order).
    Exp order_lower_bound() const {
        auto o = order();
        return o ? *o : prec_ + 1;
    }

    // Forces the denominator into lowest terms.
    void reduce_content() {
        if (den_ == 1) return;
        mpz_class g = den_;
        for (Exp e = 0; e <= prec_ && g != 1; ++e) {
            auto idx = static_cast<std::size_t>(e);
            if (sgn(re_[idx]) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), re_[idx].get_mpz_t());
            if (sgn(im_[idx]) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), im_[idx].get_mpz_t());
        }
        if (g == 1) return;
        if (is_zero_to_prec()) {
            den_ = 1;
            return;
        }
        for (auto& v : re_) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
        for (auto& v : im_) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
    }

private:
    std::vector<mpz_class> re_, im_;
    mpz_class den_;
    Exp prec_;
    bool has_im_;

    static Exp check_prec(Exp p) {
        if (p < 0) throw PrecisionError("precision must be non-negative");
        return p;
    }

    void alloc() {
        re_.assign(static_cast<std::size_t>(prec_) + 1, mpz_class(0));
        im_.assign(static_cast<std::size_t>(prec_) + 1, mpz_class(0));
    }

    bool coeff_zero(Exp e) const {
        auto idx = static_cast<std::size_t>(e);
        return sgn(re_[idx]) == 0 && (!has_im_ || sgn(im_[idx]) == 0);
    }

    void rescan_im() {
        has_im_ = false;
        for (const auto& v : im_)
            if (sgn(v) != 0) {
                has_im_ = true;
                break;
            }
    }

    void reduce_if_heavy() {
        if (mpz_size(den_.get_mpz_t()) > 8) reduce_content();
    }

    // Installs a canonical coefficient, rescaling the shared denominator.
    void set_coeff(Exp e, const GaussianRational& c) {
        mpz_class cd = c.real().get_den();
        mpz_lcm(cd.get_mpz_t(), cd.get_mpz_t(), c.imag().get_den().get_mpz_t());
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), den_.get_mpz_t(), cd.get_mpz_t());
        if (l != den_) {
            mpz_class f = l / den_;
            for (auto& v : re_) v *= f;
            for (auto& v : im_) v *= f;
            den_ = l;
        }
        auto idx = static_cast<std::size_t>(e);
        re_[idx] = c.real().get_num() * (den_ / c.real().get_den());
        im_[idx] = c.imag().get_num() * (den_ / c.imag().get_den());
        if (sgn(im_[idx]) != 0) has_im_ = true;
    }

    static TruncatedSeries add_sub(const TruncatedSeries& a, const TruncatedSeries& b, bool subtract) {
        TruncatedSeries s = zero(std::min(a.prec_, b.prec_));
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), a.den_.get_mpz_t(), b.den_.get_mpz_t());
        mpz_class fa = l / a.den_, fb = l / b.den_;
        s.den_ = l;
        for (Exp e = 0; e <= s.prec_; ++e) {
            auto idx = static_cast<std::size_t>(e);
            s.re_[idx] = a.re_[idx] * fa;
            s.im_[idx] = a.im_[idx] * fa;
            if (subtract) {
                s.re_[idx] -= b.re_[idx] * fb;
                s.im_[idx] -= b.im_[idx] * fb;
            } else {
                s.re_[idx] += b.re_[idx] * fb;
                s.im_[idx] += b.im_[idx] * fb;
            }
        }
        s.rescan_im();
        s.reduce_if_heavy();
        return s;
    }

    friend class SeriesPowerCache;
};

// Memoised powers of a fixed series, truncated at a shared cap.  pow(k) costs
// one multiplication beyond pow(floor(k/2)) and pow(ceil(k/2)), which makes
// sparse compositions cheap and dense ones no worse than Horner.
class SeriesPowerCache {
public:
    SeriesPowerCache(TruncatedSeries base, TruncatedSeries::Exp cap)
        : cap_(cap) {
        cache_.emplace(1, std::move(base));
    }

    const TruncatedSeries& pow(TruncatedSeries::Exp k) {
        if (k < 1) throw PreconditionError("SeriesPowerCache: exponent must be >= 1");
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        const TruncatedSeries& lo = pow(k / 2);
        const TruncatedSeries& hi = pow(k - k / 2);
        auto [pos, ignored] =
            cache_.emplace(k, TruncatedSeries::mul_capped(lo, hi, cap_));
        return pos->second;
    }

private:
    TruncatedSeries::Exp cap_;
    std::map<TruncatedSeries::Exp, TruncatedSeries> cache_;
};

// Composition a(b(t)); the inner series must have zero constant term.
inline TruncatedSeries compose(const TruncatedSeries& a, const TruncatedSeries& b) {
    using Exp = TruncatedSeries::Exp;
    if (!b.coeff(0).is_zero()) throw CompositionOrderError();
    Exp ordb = b.order_lower_bound();
    // Coefficients of a beyond its precision first matter at (prec_a+1)*ord(b).
    Exp p = (a.prec() + 1) * std::max<Exp>(ordb, 1) - 1;
    SeriesPowerCache powers(b, p);
    std::vector<Exp> sup = a.support();
    TruncatedSeries acc = TruncatedSeries::monomial(0, a.coeff(0), p);
    std::vector<std::pair<GaussianRational, const TruncatedSeries*>> terms;
    for (Exp k : sup) {
        if (k == 0) continue;
        if (k * ordb > p) break;
        const TruncatedSeries& bk = powers.pow(k);
        p = std::min(p, bk.prec());
        terms.emplace_back(a.coeff(k), &bk);
    }
    acc = acc.truncated(p);
    for (auto& [c, bk] : terms) acc = acc + bk->scaled(c).truncated(p);
    return acc;
}

namespace detail {

// Multiplicative inverse of a series with nonzero constant term.
inline TruncatedSeries inverse_unit(const TruncatedSeries& u) {
    using Exp = TruncatedSeries::Exp;
    GaussianRational u0 = u.coeff(0);
    if (u0.is_zero()) throw PreconditionError("inverse_unit: constant term vanishes");
    Exp p = u.prec();
    std::vector<GaussianRational> uc(static_cast<std::size_t>(p) + 1);
    for (Exp e = 0; e <= p; ++e) uc[static_cast<std::size_t>(e)] = u.coeff(e);
    std::vector<GaussianRational> w(static_cast<std::size_t>(p) + 1);
    GaussianRational inv0 = u0.inverse();
    w[0] = inv0;
    for (Exp k = 1; k <= p; ++k) {
        GaussianRational s;
        for (Exp j = 1; j <= k; ++j) {
            const GaussianRational& uj = uc[static_cast<std::size_t>(j)];
            if (uj.is_zero()) continue;
            s += uj * w[static_cast<std::size_t>(k - j)];
        }
        w[static_cast<std::size_t>(k)] = -(s * inv0);
    }
    std::map<Exp, GaussianRational> m;
    for (Exp e = 0; e <= p; ++e)
        if (!w[static_cast<std::size_t>(e)].is_zero()) m.emplace(e, w[static_cast<std::size_t>(e)]);
    return TruncatedSeries::from_coeffs(m, p);
}

} // namespace detail

// n-th root of a series with constant term 1, via the binomial expansion of
// (1+e)^(1/n); only finitely many powers of e contribute per coefficient.
inline TruncatedSeries unit_root(const TruncatedSeries& s, unsigned n) {
    using Exp = TruncatedSeries::Exp;
    if (n == 0) throw PreconditionError("unit_root: root index must be positive");
    if (!s.coeff(0).is_one()) throw PreconditionError("unit_root: constant term must be 1");
    Exp p = s.prec();
    TruncatedSeries e = s - TruncatedSeries::one(p);
    Exp orde = e.order_lower_bound();
    TruncatedSeries acc = TruncatedSeries::one(p);
    if (e.is_zero_to_prec()) return acc;
    SeriesPowerCache powers(e, p);
    mpq_class coef(1);
    mpq_class inv_n(1, n);
    inv_n.canonicalize();
    for (Exp j = 1; j * orde <= p; ++j) {
        coef *= (inv_n - (j - 1)) / j;
        acc = acc + powers.pow(j).scaled(GaussianRational(coef)).truncated(p);
    }
    return acc;
}

// n-th root of a series whose order is divisible by n, when the scalar root
// of the leading coefficient exists in Q(i); nullopt otherwise.
inline std::optional<TruncatedSeries> nth_root(const TruncatedSeries& s, unsigned n) {
    using Exp = TruncatedSeries::Exp;
    if (n == 0) throw PreconditionError("nth_root: root index must be positive");
    auto ord = s.order();
    if (!ord) throw PreconditionError("nth_root: series is zero to precision, order unknown");
    if (*ord % static_cast<Exp>(n) != 0) throw OrderNotDivisible();
    GaussianRational lc = s.coeff(*ord);
    auto r0 = nth_root(lc, n);
    if (!r0) return std::nullopt;
    TruncatedSeries unit = s.scaled(lc.inverse()).shifted(-*ord);
    TruncatedSeries g = unit_root(unit, n);
    return g.scaled(*r0).shifted(*ord / static_cast<Exp>(n));
}

// Compositional inverse of a series of order one (Lagrange inversion):
// [t^k] b^<-1> = (1/k) [t^(k-1)] (t/b)^k.
inline TruncatedSeries comp_inverse(const TruncatedSeries& b) {
    using Exp = TruncatedSeries::Exp;
    auto ord = b.order();
    if (!ord || *ord != 1) throw PreconditionError("comp_inverse: series must have order 1");
    Exp p = b.prec();
    if (p < 1) throw PrecisionError("comp_inverse: precision too small");
    TruncatedSeries u = b.shifted(-1);
    TruncatedSeries z = detail::inverse_unit(u);
    Exp zp = z.prec(); // p - 1
    std::map<Exp, GaussianRational> inv;
    TruncatedSeries zn = TruncatedSeries::one(zp);
    for (Exp k = 1; k <= p; ++k) {
        zn = TruncatedSeries::mul_capped(zn, z, zp);
        GaussianRational c = zn.coeff(k - 1);
        if (!c.is_zero()) {
            mpq_class inv_k(1, static_cast<unsigned long>(k));
            inv_k.canonicalize();
            inv.emplace(k, c * GaussianRational(inv_k));
        }
    }
    return TruncatedSeries::from_coeffs(inv, p);
}

inline TruncatedSeries conj(const TruncatedSeries& s) { return s.conj(); }

} // namespace curvesing
