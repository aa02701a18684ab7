#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "curvesing/errors.hpp"
#include "curvesing/gaussian.hpp"
#include "curvesing/series.hpp"

namespace curvesing {

// Finitely supported polynomial in two variables x, y over Q(i).
class BivariatePoly {
public:
    using Deg = std::int64_t;
    using Key = std::pair<Deg, Deg>; // (deg_x, deg_y)

    BivariatePoly() = default;

    static BivariatePoly constant(const GaussianRational& c) {
        BivariatePoly p;
        p.add_term(0, 0, c);
        return p;
    }
    static BivariatePoly variable_x() { return monomial(1, 0, GaussianRational(1)); }
    static BivariatePoly variable_y() { return monomial(0, 1, GaussianRational(1)); }
    static BivariatePoly monomial(Deg dx, Deg dy, const GaussianRational& c) {
        BivariatePoly p;
        p.add_term(dx, dy, c);
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<Key, GaussianRational>& terms() const { return terms_; }

    GaussianRational coeff(Deg dx, Deg dy) const {
        auto it = terms_.find({dx, dy});
        return it == terms_.end() ? GaussianRational() : it->second;
    }

    void add_term(Deg dx, Deg dy, const GaussianRational& c) {
        if (c.is_zero()) return;
        if (dx < 0 || dy < 0) throw PreconditionError("BivariatePoly: negative degree");
        auto [it, inserted] = terms_.emplace(Key{dx, dy}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Deg deg_x() const {
        Deg d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first);
        return d;
    }
    Deg deg_y() const {
        Deg d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.second);
        return d;
    }

    BivariatePoly operator-() const {
        BivariatePoly r;
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }

    friend BivariatePoly operator+(const BivariatePoly& a, const BivariatePoly& b) {
        BivariatePoly r = a;
        for (const auto& [k, c] : b.terms_) r.add_term(k.first, k.second, c);
        return r;
    }
    friend BivariatePoly operator-(const BivariatePoly& a, const BivariatePoly& b) {
        BivariatePoly r = a;
        for (const auto& [k, c] : b.terms_) r.add_term(k.first, k.second, -c);
        return r;
    }
    friend BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
        BivariatePoly r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
        return r;
    }

    BivariatePoly scaled(const GaussianRational& c) const {
        BivariatePoly r;
        if (c.is_zero()) return r;
        for (const auto& [k, v] : terms_) r.terms_.emplace(k, v * c);
        return r;
    }

    BivariatePoly conj() const {
        BivariatePoly r;
        for (const auto& [k, v] : terms_) r.terms_.emplace(k, v.conj());
        return r;
    }

    friend bool operator==(const BivariatePoly& a, const BivariatePoly& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const BivariatePoly& a, const BivariatePoly& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [k, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + render_coeff(c) + ")";
            if (k.first) s += "*x^" + std::to_string(k.first);
            if (k.second) s += "*y^" + std::to_string(k.second);
        }
        return s;
    }

private:
    std::map<Key, GaussianRational> terms_;
};

// Evaluates p along a parametrization using memoised powers of its two
// component series; cap bounds the working precision of the products.
inline TruncatedSeries eval_on_branch(const BivariatePoly& p, SeriesPowerCache& xs,
                                      SeriesPowerCache& ys, TruncatedSeries::Exp cap) {
    TruncatedSeries acc = TruncatedSeries::zero(cap);
    for (const auto& [k, c] : p.terms()) {
        auto [dx, dy] = k;
        TruncatedSeries term;
        if (dx == 0 && dy == 0) {
            term = TruncatedSeries::monomial(0, GaussianRational(1), cap);
        } else if (dx == 0) {
            term = ys.pow(dy);
        } else if (dy == 0) {
            term = xs.pow(dx);
        } else {
            term = TruncatedSeries::mul_capped(xs.pow(dx), ys.pow(dy), cap);
        }
        TruncatedSeries scaled = term.scaled(c);
        if (scaled.prec() > cap) scaled = scaled.truncated(cap);
        acc = acc + scaled;
    }
    return acc;
}

inline TruncatedSeries eval_on_branch(const BivariatePoly& p, const TruncatedSeries& x,
                                      const TruncatedSeries& y, TruncatedSeries::Exp cap) {
    SeriesPowerCache xs(x, cap), ys(y, cap);
    return eval_on_branch(p, xs, ys, cap);
}

} // namespace curvesing
