#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "curvesing/series.hpp"
#include "series_oracles.hpp"

using curvesing::GaussianRational;
using curvesing::TruncatedSeries;
using G = GaussianRational;
using S = TruncatedSeries;
using Exp = S::Exp;

namespace {

S series_of(const oracle::PolyMap& p, Exp prec) { return S::from_coeffs(p, prec); }

bool matches_poly(const S& s, const oracle::PolyMap& p) {
    for (Exp e = 0; e <= s.prec(); ++e) {
        auto it = p.find(e);
        G expected = it == p.end() ? G() : it->second;
        if (s.coeff(e) != expected) return false;
    }
    return true;
}

S random_series(std::mt19937_64& rng, Exp min_exp, Exp prec, int terms) {
    return series_of(oracle::random_poly(rng, min_exp, prec, terms), prec);
}

} // namespace

TEST_CASE("order and coefficient access") {
    S s = series_of({{3, G(1)}, {5, G(1)}}, 10);
    CHECK(s.order() == 3);
    CHECK(S::zero(10).order() == std::nullopt);
    CHECK(series_of({{1, G(5)}}, 10).order() == 1);

    CHECK(s.coeff(4) == G(0));
    CHECK(s.coeff(10) == G(0));
    CHECK_THROWS_AS(s.coeff(11), curvesing::PrecisionError);
}

TEST_CASE("ring operations and precision propagation") {
    S a = series_of({{1, G(1)}, {2, G(1)}}, 12);
    S b = series_of({{1, G(1)}, {2, G(-1)}}, 12);
    S prod = a * b;
    CHECK(prod.coeff(2) == G(1));
    CHECK(prod.coeff(3) == G(0));
    CHECK(prod.coeff(4) == G(-1));

    S x = series_of({{2, G(1)}}, 4);
    S y = series_of({{3, G(1)}}, 4);
    S m = x * y;
    CHECK(m.prec() == 6); // min(4+3, 4+2, 4+4)
    CHECK(m.coeff(5) == G(1));

    S zero = S::zero(7);
    CHECK((a.truncated(7) + zero) == a.truncated(7));
    CHECK((a + b).prec() == 12);

    // add/sub precision is the minimum of the operands.
    CHECK((a.truncated(5) - b).prec() == 5);
}

TEST_CASE("composition against naive substitution") {
    // a = t^2, b = t + t^3.
    S a = series_of({{2, G(1)}}, 12);
    S b = series_of({{1, G(1)}, {3, G(1)}}, 12);
    S c = curvesing::compose(a, b);
    CHECK(c.coeff(2) == G(1));
    CHECK(c.coeff(4) == G(2));
    CHECK(c.coeff(6) == G(1));
    CHECK(c.coeff(3) == G(0));

    // identity composition
    S t = S::identity(12);
    CHECK(curvesing::compose(t, b) == b);

    // constant term passes through
    S one_plus = series_of({{0, G(1)}, {1, G(1)}}, 8);
    S sq = series_of({{2, G(1)}}, 8);
    S r = curvesing::compose(one_plus, sq);
    CHECK(r.coeff(0) == G(1));
    CHECK(r.coeff(2) == G(1));

    CHECK_THROWS_AS(curvesing::compose(b, one_plus), curvesing::CompositionOrderError);

    std::mt19937_64 rng(1234);
    for (int k = 0; k < 60; ++k) {
        oracle::PolyMap pa = oracle::random_poly(rng, 0, 8, 4);
        oracle::PolyMap pb = oracle::random_poly(rng, 1, 8, 4);
        S sa = series_of(pa, 20), sb = series_of(pb, 20);
        S comp = curvesing::compose(sa, sb);
        oracle::PolyMap expect = oracle::poly_compose(pa, pb);
        CHECK(matches_poly(comp, expect));
    }
}

TEST_CASE("composition coefficients match the partition formula") {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 10; ++k) {
        oracle::PolyMap pa = oracle::random_poly(rng, 0, 12, 5);
        oracle::PolyMap pb = oracle::random_poly(rng, 1, 12, 5);
        S comp = curvesing::compose(series_of(pa, 12), series_of(pb, 12));
        for (Exp n = 0; n <= std::min<Exp>(12, comp.prec()); ++n) {
            CHECK(comp.coeff(n) == oracle::partition_compose_coeff(pa, pb, n));
        }
    }
}

TEST_CASE("unit_root examples") {
    S s = series_of({{0, G(1)}, {1, G(2)}, {2, G(1)}}, 10);
    S g = curvesing::unit_root(s, 2);
    CHECK(g.coeff(0) == G(1));
    CHECK(g.coeff(1) == G(1));
    CHECK(g.coeff(2) == G(0));

    S h = curvesing::unit_root(series_of({{0, G(1)}, {1, G(1)}}, 10), 2);
    CHECK(h.coeff(1) == G(mpq_class(1, 2)));
    CHECK(h.coeff(2) == G(mpq_class(-1, 8)));
    CHECK(h.coeff(3) == G(mpq_class(1, 16)));
    CHECK(S::equal_up_to(h * h, series_of({{0, G(1)}, {1, G(1)}}, 10), h.prec()));

    CHECK(curvesing::unit_root(S::one(6), 5) == S::one(6));
    CHECK_THROWS_AS(curvesing::unit_root(series_of({{0, G(2)}}, 5), 2), curvesing::PreconditionError);
}

TEST_CASE("nth_root of series") {
    S t4 = series_of({{4, G(1)}}, 12);
    auto r = curvesing::nth_root(t4, 2);
    REQUIRE(r.has_value());
    CHECK(r->order() == 2);
    CHECK(r->coeff(2) == G(1));

    S s = series_of({{2, G(1)}, {3, G(1)}}, 12);
    auto rs = curvesing::nth_root(s, 2);
    REQUIRE(rs.has_value());
    CHECK(rs->coeff(1) == G(1));
    CHECK(rs->coeff(2) == G(mpq_class(1, 2)));
    CHECK(rs->coeff(3) == G(mpq_class(-1, 8)));
    CHECK(S::equal_up_to((*rs) * (*rs), s, rs->prec()));

    CHECK(!curvesing::nth_root(series_of({{2, G(2)}}, 8), 2).has_value());
    CHECK_THROWS_AS(curvesing::nth_root(series_of({{3, G(1)}}, 8), 2), curvesing::OrderNotDivisible);
}

TEST_CASE("compositional inverse") {
    S t = S::identity(10);
    CHECK(curvesing::comp_inverse(t) == t);

    S it = series_of({{1, G::i()}}, 10);
    S inv = curvesing::comp_inverse(it);
    CHECK(inv.coeff(1) == -G::i());

    S b = series_of({{1, G(1)}, {2, G(1)}}, 10);
    S binv = curvesing::comp_inverse(b);
    CHECK(binv.coeff(1) == G(1));
    CHECK(binv.coeff(2) == G(-1));
    CHECK(binv.coeff(3) == G(2));
    CHECK(binv.coeff(4) == G(-5));
    S check = curvesing::compose(b, binv);
    CHECK(S::equal_up_to(check, S::identity(check.prec()), check.prec()));

    CHECK_THROWS_AS(curvesing::comp_inverse(series_of({{2, G(1)}}, 8)), curvesing::PreconditionError);
}

TEST_CASE("conjugation commutes with series operations") {
    S s = series_of({{1, G(1)}, {2, G::i()}}, 8);
    CHECK(s.conj().coeff(2) == -G::i());
    S real = series_of({{1, G(2)}, {3, G(mpq_class(1, 3))}}, 8);
    CHECK(real.conj() == real);
    CHECK(s.conj().conj() == s);

    std::mt19937_64 rng(4321);
    for (int k = 0; k < 25; ++k) {
        S a = random_series(rng, 0, 14, 5);
        S b = random_series(rng, 1, 14, 4);
        CHECK((a * b).conj() == a.conj() * b.conj());
        CHECK((a + b).conj() == a.conj() + b.conj());
        CHECK(curvesing::compose(a, b).conj() == curvesing::compose(a.conj(), b.conj()));
        S u = S::one(12) + random_series(rng, 1, 12, 3);
        CHECK(curvesing::unit_root(u, 3).conj() == curvesing::unit_root(u.conj(), 3));
        S ord1 = S::identity(12) + random_series(rng, 2, 12, 3);
        CHECK(curvesing::comp_inverse(ord1).conj() == curvesing::comp_inverse(ord1.conj()));
    }
}

TEST_CASE("order is additive and composition associative") {
    std::mt19937_64 rng(5150);
    for (int k = 0; k < 40; ++k) {
        S a = random_series(rng, 1, 16, 4);
        S b = random_series(rng, 1, 16, 4);
        auto oa = a.order(), ob = b.order();
        if (oa && ob) {
            auto prod_ord = (a * b).order();
            REQUIRE(prod_ord.has_value());
            CHECK(*prod_ord == *oa + *ob);
        }
        S c = random_series(rng, 1, 16, 3);
        if (!b.order() || !c.order()) continue;
        S left = curvesing::compose(curvesing::compose(a, b), c);
        S right = curvesing::compose(a, curvesing::compose(b, c));
        Exp common = std::min(left.prec(), right.prec());
        CHECK(S::equal_up_to(left.truncated(common), right.truncated(common), common));
    }
}

TEST_CASE("root round trips") {
    std::mt19937_64 rng(31337);
    for (int k = 0; k < 40; ++k) {
        unsigned n = 2 + static_cast<unsigned>(k % 3);
        S u = S::one(14) + random_series(rng, 1, 14, 4);
        S g = curvesing::unit_root(u, n);
        S p = S::one(g.prec());
        for (unsigned j = 0; j < n; ++j) p = S::mul_capped(p, g, g.prec());
        CHECK(S::equal_up_to(p, u.truncated(p.prec()), p.prec()));

        S b = S::identity(12) + random_series(rng, 2, 12, 3);
        S binv = curvesing::comp_inverse(b);
        S round = curvesing::comp_inverse(binv);
        Exp common = std::min(round.prec(), b.prec());
        CHECK(S::equal_up_to(round.truncated(common), b.truncated(common), common));
    }
}
