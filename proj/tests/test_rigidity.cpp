#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "curvesing/rigidity.hpp"

using namespace curvesing;
using G = GaussianRational;

namespace {

// Independent route: evaluate both sides of the constraint as field values at
// a sample point z (no Laurent expansion involved).
G side_value(std::int64_t k, const G& c, const G& s, const G& z, std::int64_t power) {
    G zk = z.pow(k);
    G zmk = z.pow(-k);
    G half(mpq_class(1, 2));
    G cos_v = (zk + zmk) * half;
    G sin_v = (zk - zmk) * half / G::i();
    return (c * cos_v + s * sin_v).pow(power);
}

bool constraint_by_values(std::int64_t v0, std::int64_t v1, const LinearTaylorMap& m) {
    // degree of both Laurent sides is v0*v1; equality at > 2*v0*v1 distinct
    // points on the unit "circle" of Q(i) decides polynomial equality
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> num(1, 40);
    std::set<std::pair<long, long>> seen;
    int needed = static_cast<int>(2 * v0 * v1 + 1);
    while (needed > 0) {
        long a = num(rng), b = num(rng);
        if (!seen.insert({a, b}).second) continue;
        G z{mpq_class(a), mpq_class(b)};
        if (side_value(v0, m.alpha, m.alpha_p, z, v1) != side_value(v1, m.beta, m.beta_p, z, v0))
            return false;
        --needed;
    }
    return true;
}

} // namespace

TEST_CASE("laurent encoding is sound") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> kd(1, 12);
    for (int j = 0; j < 20; ++j) {
        std::int64_t k = kd(rng);
        LaurentPoly pyth = LaurentPoly::cosine(k) * LaurentPoly::cosine(k) +
                           LaurentPoly::sine(k) * LaurentPoly::sine(k);
        CHECK(pyth == LaurentPoly::monomial(0, G(1)));
    }
}

TEST_CASE("constraint examples at (2,3)") {
    LinearTaylorMap exp_map{G(1), G::i(), G(1), G::i()};
    CHECK(constraint_holds(2, 3, exp_map));
    LinearTaylorMap conj_map{G(1), -G::i(), G(1), -G::i()};
    CHECK(constraint_holds(2, 3, conj_map));
    LinearTaylorMap ones{G(1), G(1), G(1), G(1)};
    CHECK(!constraint_holds(2, 3, ones));

    // independent value-sampling oracle agrees
    CHECK(constraint_by_values(2, 3, exp_map));
    CHECK(constraint_by_values(2, 3, conj_map));
    CHECK(!constraint_by_values(2, 3, ones));

    // same-sign families but broken power compatibility must fail
    LinearTaylorMap incompatible{G(1), G::i(), G(2), G(2) * G::i()};
    CHECK(classify_linear_map(incompatible) != MapClass::Neither);
    CHECK(!constraint_holds(2, 3, incompatible));

    CHECK_THROWS_AS(constraint_holds(3, 2, exp_map), PreconditionError);
    CHECK_THROWS_AS(constraint_holds(2, 4, exp_map), PreconditionError);
}

TEST_CASE("classification by the Cauchy-Riemann test") {
    CHECK(classify_linear_map({G(1), G::i(), G(1), G::i()}) == MapClass::Holomorphic);
    CHECK(classify_linear_map({G(1), -G::i(), G(1), -G::i()}) == MapClass::Antiholomorphic);
    CHECK(classify_linear_map({G(1), G(1), G(1), G(1)}) == MapClass::Neither);
    CHECK(classify_linear_map({G(1), G::i(), G(1), -G::i()}) == MapClass::Neither);
}

TEST_CASE("solve_constraints certifies the two families and refutes the rest") {
    for (auto [v0, v1] : std::vector<std::pair<std::int64_t, std::int64_t>>{{2, 3}, {3, 4}}) {
        RigiditySearch search = solve_constraints(v0, v1, 800, 99);
        CHECK(search.family_checked >= 16);
        CHECK(search.random_rejected > 0);
        for (const LinearTaylorMap& m : search.solutions) {
            CHECK(constraint_holds(v0, v1, m));
            CHECK(classify_linear_map(m) != MapClass::Neither);
            // derived identity beta alpha' = alpha beta'
            CHECK(m.beta * m.alpha_p == m.alpha * m.beta_p);
        }
    }
}

TEST_CASE("constraint implies the derived product identity") {
    std::mt19937_64 rng(31);
    RigiditySearch search = solve_constraints(2, 5, 400, 1234);
    for (const LinearTaylorMap& m : search.solutions)
        CHECK(m.beta * m.alpha_p == m.alpha * m.beta_p);
}
