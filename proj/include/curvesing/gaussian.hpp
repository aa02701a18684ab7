#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "curvesing/errors.hpp"

namespace curvesing {

// Exact element of Q(i): a pair of arbitrary-precision rationals in canonical
// form (reduced, positive denominators).  All arithmetic is exact; there is no
// floating-point path anywhere in this type.
class GaussianRational {
public:
    GaussianRational() : re_(0), im_(0) {}
    GaussianRational(long v) : re_(v), im_(0) {}             // NOLINT(google-explicit-constructor)
    GaussianRational(const mpq_class& re) : re_(re), im_(0) {} // NOLINT(google-explicit-constructor)
    GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return {mpq_class(0), mpq_class(1)}; }
    static GaussianRational ratio(long num, long den) {
        if (den == 0) throw DivisionByZero();
        mpq_class q(num, den);
        q.canonicalize();
        return {q, mpq_class(0)};
    }

    const mpq_class& real() const { return re_; }
    const mpq_class& imag() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, mpq_class(-im_)}; }

    // Field norm re^2 + im^2 (a non-negative rational).
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational operator-() const { return {mpq_class(-re_), mpq_class(-im_)}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        if (is_real() && o.is_real()) {
            re_ *= o.re_;
            return *this;
        }
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw DivisionByZero();
        if (o.is_real()) {
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        mpq_class n = o.norm();
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    GaussianRational inverse() const {
        GaussianRational one(1);
        return one /= *this;
    }

    GaussianRational pow(long k) const {
        if (k < 0) return inverse().pow(-k);
        GaussianRational acc(1), base = *this;
        unsigned long e = static_cast<unsigned long>(k);
        while (e != 0) {
            if (e & 1u) acc *= base;
            base *= base;
            e >>= 1u;
        }
        return acc;
    }

    // Lexicographic comparison on (re, im); used for deterministic choices.
    static int lex_compare(const GaussianRational& a, const GaussianRational& b) {
        int c = cmp(a.re_, b.re_);
        if (c != 0) return c;
        return cmp(a.im_, b.im_);
    }

    std::string str() const;

private:
    mpq_class re_, im_;
};

namespace detail {

inline std::string rational_str(const mpq_class& q) {
    return q.get_str();
}

// Gaussian integer power (re, im as mpz), by squaring.
inline void gz_mul(mpz_class& ar, mpz_class& ai, const mpz_class& br, const mpz_class& bi) {
    mpz_class r = ar * br - ai * bi;
    mpz_class i = ar * bi + ai * br;
    ar = std::move(r);
    ai = std::move(i);
}

inline void gz_pow(mpz_class& r, mpz_class& i, unsigned long n) {
    mpz_class ar(1), ai(0);
    mpz_class br = r, bi = i;
    while (n != 0) {
        if (n & 1ul) gz_mul(ar, ai, br, bi);
        gz_mul(br, bi, br, bi);
        n >>= 1ul;
    }
    r = std::move(ar);
    i = std::move(ai);
}

} // namespace detail

// Renders a value in the exact coefficient grammar:
//   RAT   = -? DIGITS (/ DIGITS)?
//   COEFF = RAT | RAT i | RAT (+|-) RAT i | i | -i
inline std::string render_coeff(const GaussianRational& a) {
    using detail::rational_str;
    if (a.is_real()) return rational_str(a.real());
    if (sgn(a.real()) == 0) {
        if (a.imag() == 1) return "i";
        if (a.imag() == -1) return "-i";
        return rational_str(a.imag()) + "i";
    }
    std::string s = rational_str(a.real());
    if (sgn(a.imag()) > 0) {
        s += "+" + rational_str(a.imag()) + "i";
    } else {
        s += "-" + rational_str(mpq_class(-a.imag())) + "i";
    }
    return s;
}

inline std::string GaussianRational::str() const { return render_coeff(*this); }

// Parses the coefficient grammar above.  Throws ParseError with the character
// position of the first offending byte.
inline GaussianRational parse_coeff(std::string_view text) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) -> GaussianRational {
        throw ParseError("bad coefficient '" + std::string(text) + "': " + msg +
                         " at offset " + std::to_string(pos));
    };
    auto at_end = [&] { return pos >= text.size(); };

    // RAT = -? DIGITS (/ DIGITS)?
    auto parse_rat = [&]() -> mpq_class {
        std::size_t start = pos;
        if (!at_end() && text[pos] == '-') ++pos;
        std::size_t digits_start = pos;
        while (!at_end() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == digits_start) fail("expected digits");
        mpz_class num(std::string(text.substr(start, pos - start)), 10);
        mpz_class den(1);
        if (!at_end() && text[pos] == '/') {
            ++pos;
            std::size_t den_start = pos;
            while (!at_end() && text[pos] >= '0' && text[pos] <= '9') ++pos;
            if (pos == den_start) fail("expected digits after '/'");
            den = mpz_class(std::string(text.substr(den_start, pos - den_start)), 10);
            if (sgn(den) == 0) fail("zero denominator");
        }
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    };

    if (text == "i") return GaussianRational::i();
    if (text == "-i") return -GaussianRational::i();
    if (text.empty()) fail("empty literal");

    mpq_class first = parse_rat();
    if (at_end()) return GaussianRational(first);
    if (text[pos] == 'i') {
        ++pos;
        if (!at_end()) fail("trailing characters");
        return {mpq_class(0), first};
    }
    if (text[pos] == '+' || text[pos] == '-') {
        bool neg = text[pos] == '-';
        ++pos;
        mpq_class second = parse_rat();
        if (at_end() || text[pos] != 'i') fail("expected 'i'");
        ++pos;
        if (!at_end()) fail("trailing characters");
        if (neg) second = -second;
        return {first, second};
    }
    return fail("unexpected character");
}

// Order of a as a root of unity.  In Q(i) the only roots of unity are
// {1, -1, i, -i}; anything else yields nullopt.
inline std::optional<int> root_of_unity_order(const GaussianRational& a) {
    if (a.is_real()) {
        if (a.real() == 1) return 1;
        if (a.real() == -1) return 2;
        return std::nullopt;
    }
    if (sgn(a.real()) == 0 && (a.imag() == 1 || a.imag() == -1)) return 4;
    return std::nullopt;
}

// Deterministic n-th root in Q(i): returns an x with x^n = a when one exists,
// choosing the lexicographically greatest (re, im) candidate, or nullopt when
// no root lies in the field.  Roots are found by clearing denominators and
// searching lattice points of the prescribed norm; intended for the small
// coefficients that arise in normal forms.
inline std::optional<GaussianRational> nth_root(const GaussianRational& a, unsigned n) {
    if (n == 0) throw PreconditionError("nth_root: root index must be positive");
    if (n == 1) return a;
    if (a.is_zero()) return GaussianRational();

    // Fast path: positive rational with an exact rational root.  Such a root,
    // when it exists, has maximal real part among all candidates.
    if (a.is_real() && sgn(a.real()) > 0) {
        mpz_class rn, rd;
        bool en = mpz_root(rn.get_mpz_t(), a.real().get_num().get_mpz_t(), n) != 0;
        bool ed = mpz_root(rd.get_mpz_t(), a.real().get_den().get_mpz_t(), n) != 0;
        if (en && ed) {
            mpq_class q(rn, rd);
            q.canonicalize();
            return GaussianRational(q);
        }
    }

    // Clear denominators: with D = lcm of the denominators, y = x*D must be a
    // Gaussian integer satisfying y^n = a * D^n.
    mpz_class d;
    mpz_lcm(d.get_mpz_t(), a.real().get_den().get_mpz_t(), a.imag().get_den().get_mpz_t());
    mpz_class dn;
    mpz_pow_ui(dn.get_mpz_t(), d.get_mpz_t(), n);
    mpq_class gre_q = a.real() * dn;
    mpq_class gim_q = a.imag() * dn;
    mpz_class gr = gre_q.get_num();
    mpz_class gi = gim_q.get_num();

    mpz_class normg = gr * gr + gi * gi;
    mpz_class s;
    if (mpz_root(s.get_mpz_t(), normg.get_mpz_t(), n) == 0) return std::nullopt;

    mpz_class umax;
    mpz_sqrt(umax.get_mpz_t(), s.get_mpz_t());

    std::optional<GaussianRational> best;
    auto consider = [&](const mpz_class& u, const mpz_class& v) {
        mpz_class pr = u, pi = v;
        detail::gz_pow(pr, pi, n);
        if (pr != gr || pi != gi) return;
        mpq_class xr(u, d), xi(v, d);
        xr.canonicalize();
        xi.canonicalize();
        GaussianRational cand(xr, xi);
        if (!best || GaussianRational::lex_compare(cand, *best) > 0) best = cand;
    };

    for (mpz_class u(0); u <= umax; ++u) {
        mpz_class v2 = s - u * u;
        if (mpz_perfect_square_p(v2.get_mpz_t()) == 0) continue;
        mpz_class v;
        mpz_sqrt(v.get_mpz_t(), v2.get_mpz_t());
        consider(u, v);
        if (sgn(v) != 0) consider(u, mpz_class(-v));
        if (sgn(u) != 0) {
            consider(mpz_class(-u), v);
            if (sgn(v) != 0) consider(mpz_class(-u), mpz_class(-v));
        }
    }
    return best;
}

} // namespace curvesing
