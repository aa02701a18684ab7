#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "branch_oracles.hpp"
#include "curvesing/branch.hpp"
#include "curvesing/value_sets.hpp"

using namespace curvesing;
using G = GaussianRational;

namespace {

BranchParam poly_branch(std::map<Exp, G> xc, std::map<Exp, G> yc) {
    return BranchParam::from_polys(xc, yc);
}

BranchParam moduli_family(const G& eps) {
    std::map<Exp, G> yc{{9, G(1)}, {10, G(1)}, {11, G(mpq_class(19, 18))}};
    if (!eps.is_zero()) yc[15] = eps;
    return poly_branch({{4, G(1)}}, yc);
}

} // namespace

TEST_CASE("primitive_reduce") {
    BranchParam a = poly_branch({{2, G(1)}}, {{4, G(1)}});
    BranchParam r = primitive_reduce(a);
    CHECK(r.x.coeffs() == std::map<Exp, G>{{1, G(1)}});
    CHECK(r.y.coeffs() == std::map<Exp, G>{{2, G(1)}});

    BranchParam b = poly_branch({{2, G(1)}}, {{3, G(1)}});
    CHECK(primitive_reduce(b).x.coeffs() == b.x.coeffs());

    BranchParam c = poly_branch({{4, G(1)}}, {{6, G(1)}, {9, G(1)}});
    CHECK(primitive_reduce(c).x.coeffs() == c.x.coeffs());
}

TEST_CASE("normalize straightens x and scales v1") {
    // (t^2 + 2t^3 + t^4, t^3): reparametrize by the inverse of t + t^2.
    BranchParam b = poly_branch({{2, G(1)}, {3, G(2)}, {4, G(1)}}, {{3, G(1)}});
    NormalizedBranch nb = normalize(b, 14);
    CHECK(nb.v0 == 2);
    CHECK(nb.v1() == 3);
    CHECK(nb.y.coeff(3) == G(1));
    CHECK(nb.y.coeff(4) == G(-3));

    // witness replay reproduces (t^2, y)
    BranchParam replayed = apply_changes(nb.witness, materialize(b, 15));
    CHECK(replayed.x.support() == std::vector<Exp>{2});
    Exp common = std::min(replayed.y.prec(), nb.y.prec());
    CHECK(TruncatedSeries::equal_up_to(replayed.y.truncated(common), nb.y.truncated(common), common));

    // (4t^2, t^3): scaling absorption only.
    NormalizedBranch nb2 = normalize(poly_branch({{2, G(4)}}, {{3, G(1)}}), 10);
    CHECK(nb2.v0 == 2);
    CHECK(nb2.ycoeffs() == std::map<Exp, G>{{3, G(1)}});

    // already in shape
    NormalizedBranch nb3 = normalize(moduli_family(G(0)), 20);
    CHECK(nb3.v0 == 4);
    CHECK(nb3.v1() == 9);
    CHECK(nb3.y.coeff(11) == G(mpq_class(19, 18)));

    // smooth branch reduces to (t, 0)
    NormalizedBranch nb4 = normalize(poly_branch({{1, G(1)}}, {{2, G(1)}, {5, G(-2)}}), 10);
    CHECK(nb4.smooth);
    CHECK(nb4.y.is_zero_to_prec());
}

TEST_CASE("equal-order components are resolved by shears") {
    BranchParam b = poly_branch({{2, G(1)}}, {{2, G(3)}, {3, G(1)}});
    NormalizedBranch nb = normalize(b, 12);
    CHECK(nb.v0 == 2);
    CHECK(nb.v1() == 3);
    BranchParam replayed = apply_changes(nb.witness, materialize(b, 13));
    CHECK(replayed.x.support() == std::vector<Exp>{2});
}

TEST_CASE("semigroup of the moduli family is <4,9> with conductor 24") {
    for (const G& eps : {G(0), G(mpq_class(1, 2)), G::i()}) {
        BranchAnalysis a = analyze(moduli_family(eps));
        CHECK(a.gamma.sg.generators == std::vector<std::int64_t>{4, 9});
        std::int64_t oracle_c = oracle::conductor_by_enumeration({4, 9}, 64);
        CHECK(a.gamma.sg.conductor == oracle_c);
        CHECK(a.gamma.sg.conductor == 24);
        CHECK(a.gamma.sg.members ==
              oracle::semigroup_members({4, 9}, a.gamma.sg.bound));
    }
}

TEST_CASE("semigroup closure agrees with brute-force enumeration") {
    struct Case {
        BranchParam b;
        std::vector<std::int64_t> gens;
        std::int64_t conductor;
    };
    std::vector<Case> cases;
    cases.push_back({poly_branch({{2, G(1)}}, {{3, G(1)}}), {2, 3}, 2});
    cases.push_back({poly_branch({{3, G(1)}}, {{7, G(1)}, {8, G(1)}}), {3, 7}, 12});
    cases.push_back({poly_branch({{4, G(1)}}, {{6, G(1)}, {7, G(1)}}), {4, 6, 13}, 16});
    for (const auto& c : cases) {
        BranchAnalysis a = analyze(c.b);
        CHECK(a.gamma.sg.generators == c.gens);
        CHECK(a.gamma.sg.conductor == c.conductor);
        CHECK(a.gamma.sg.conductor == oracle::conductor_by_enumeration(c.gens, 80));
        CHECK(a.gamma.sg.members == oracle::semigroup_members(c.gens, a.gamma.sg.bound));
    }
}

TEST_CASE("characteristic exponents by gcd descent") {
    CHECK(analyze(moduli_family(G(0))).char_exps == std::vector<std::int64_t>{4, 9});
    CHECK(analyze(poly_branch({{4, G(1)}}, {{6, G(1)}, {7, G(1)}})).char_exps ==
          std::vector<std::int64_t>{4, 6, 7});
    CHECK(analyze(poly_branch({{1, G(1)}}, {{3, G(5)}})).char_exps == std::vector<std::int64_t>{1});

    // cross-oracle: generators from the recursion match the order closure
    std::mt19937_64 rng(2718);
    for (int k = 0; k < 12; ++k) {
        BranchParam b = oracle::random_branch(rng);
        BranchAnalysis a = analyze(b);
        CHECK(a.gamma.sg.generators == oracle::generators_from_char(a.char_exps));
    }
}

TEST_CASE("differential values") {
    // monomial branch: Lambda = Gamma \ {0} inside the window
    BranchAnalysis mono = analyze(poly_branch({{4, G(1)}}, {{9, G(1)}}));
    REQUIRE(mono.lambda.has_value());
    std::vector<std::int64_t> expect;
    for (std::int64_t m : mono.gamma.sg.members)
        if (m >= 1 && m <= mono.lambda->values.bound) expect.push_back(m);
    CHECK(mono.lambda->values.members == expect);
    CHECK(mono.monomial_class);

    // (t^3, t^7 + t^8): 11 in Lambda, 8 not in Lambda, zariski = 8
    BranchAnalysis eph = analyze(poly_branch({{3, G(1)}}, {{7, G(1)}, {8, G(1)}}));
    REQUIRE(eph.lambda.has_value());
    CHECK(eph.lambda->values.contains(11));
    CHECK(!eph.lambda->values.contains(8));
    REQUIRE(eph.zariski.has_value());
    CHECK(*eph.zariski == 8);

    // Lambda always contains [c + v0, bound]
    for (std::int64_t m = eph.gamma.sg.conductor + 3; m <= eph.lambda->values.bound; ++m)
        CHECK(eph.lambda->values.contains(m));

    // moduli family: zariski invariant 10
    BranchAnalysis fam = analyze(moduli_family(G(mpq_class(1, 2))));
    REQUIRE(fam.zariski.has_value());
    CHECK(*fam.zariski == 10);

    // Lambda contains Gamma \ {0} on the window
    for (std::int64_t m : fam.gamma.sg.members)
        if (m >= 1 && m <= fam.lambda->values.bound) CHECK(fam.lambda->values.contains(m));
}

TEST_CASE("invariants are A-invariant and replay is exact") {
    std::mt19937_64 rng(1618);
    for (int k = 0; k < 8; ++k) {
        BranchParam b = oracle::random_branch(rng);
        BranchAnalysis base = analyze(b);
        for (int j = 0; j < 3; ++j) {
            ChangeLog log;
            log.append(oracle::random_change(rng));
            BranchParam tb = apply_changes(log, b);
            BranchAnalysis ta = analyze(tb);
            CHECK(ta.gamma.sg.generators == base.gamma.sg.generators);
            CHECK(ta.gamma.sg.conductor == base.gamma.sg.conductor);
            CHECK(ta.char_exps == base.char_exps);
            REQUIRE(ta.lambda.has_value());
            REQUIRE(base.lambda.has_value());
            CHECK(ta.lambda->values == base.lambda->values);
            CHECK(ta.zariski == base.zariski);
        }
        // normalize witness replay at the analysis precision
        BranchParam replayed = apply_changes(base.nb.witness, materialize(base.reduced, base.nb.prec() + base.nb.v0));
        CHECK(replayed.x.support() == std::vector<Exp>{base.nb.v0});
        Exp common = std::min(replayed.y.prec(), base.nb.y.prec());
        CHECK(TruncatedSeries::equal_up_to(replayed.y.truncated(common), base.nb.y.truncated(common),
                                           common));
    }
}

TEST_CASE("conjugation preserves integer invariants") {
    BranchParam b = moduli_family(G::i());
    BranchAnalysis a = analyze(b);
    BranchAnalysis ac = analyze(b.conj());
    CHECK(a.gamma.sg.members == ac.gamma.sg.members);
    CHECK(a.char_exps == ac.char_exps);
    CHECK(a.lambda->values == ac.lambda->values);
    CHECK(a.zariski == ac.zariski);
}

TEST_CASE("precision exhaustion surfaces for series-backed input") {
    TruncatedSeries x = TruncatedSeries::from_coeffs({{4, G(1)}}, 10);
    TruncatedSeries y = TruncatedSeries::from_coeffs({{9, G(1)}}, 10);
    BranchParam b{x, y, false};
    CHECK_THROWS_AS(analyze(b), PrecisionExhausted);
    CHECK_THROWS_AS(analyze(b, std::optional<Exp>(40)), PrecisionExhausted);
}
