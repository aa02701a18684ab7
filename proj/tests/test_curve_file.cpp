#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "curvesing/report.hpp"
#include "series_oracles.hpp"

using namespace curvesing;
using G = GaussianRational;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("parse the moduli example") {
    std::string text =
        R"({"curves":[{"name":"C","branches":[{"x":[[4,"1"]],"y":[[9,"1"],[10,"1"],[11,"19/18"],[15,"1/2"]]}]}]})";
    CurveFile f = parse_curve_file(text);
    REQUIRE(f.curves.size() == 1);
    CHECK(f.curves[0].name == "C");
    REQUIRE(f.curves[0].branches.size() == 1);
    const BranchSpec& b = f.curves[0].branches[0];
    CHECK(b.x == std::map<Exp, G>{{4, G(1)}});
    CHECK(b.y.at(11) == G(mpq_class(19, 18)));
    CHECK(b.y.at(15) == G(mpq_class(1, 2)));
}

TEST_CASE("parse failures carry positions") {
    CHECK_THROWS_AS(parse_curve_file("{"), ParseError);
    try {
        parse_curve_file("{\n  \"curves\": [nope]\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    // malformed rational inside a coefficient string
    std::string bad =
        R"({"curves":[{"name":"C","branches":[{"x":[[1,"1//2"]],"y":[]}]}]})";
    CHECK_THROWS_AS(parse_curve_file(bad), ParseError);
    try {
        parse_curve_file(bad);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("branches[0].x[0]") != std::string::npos);
    }

    // exponent 0 is a validation error (parametrizations fix the origin)
    std::string zero_exp =
        R"({"curves":[{"name":"C","branches":[{"x":[[0,"1"]],"y":[[2,"1"]]}]}]})";
    CHECK_THROWS_AS(parse_curve_file(zero_exp), ValidationError);

    std::string dup_names =
        R"({"curves":[{"name":"C","branches":[{"x":[[1,"1"]],"y":[]}]},{"name":"C","branches":[{"x":[[1,"1"]],"y":[]}]}]})";
    CHECK_THROWS_AS(parse_curve_file(dup_names), ValidationError);

    std::string both_zero = R"({"curves":[{"name":"C","branches":[{"x":[],"y":[]}]}]})";
    CHECK_THROWS_AS(parse_curve_file(both_zero), ValidationError);
}

TEST_CASE("emit and parse round trip") {
    for (const char* path : {"corpus/moduli.json", "corpus/ephraim.json", "corpus/curves.json"}) {
        CurveFile f = parse_curve_file(slurp(path));
        std::string emitted = emit_curve_file(f);
        CurveFile g = parse_curve_file(emitted);
        CHECK(emit_curve_file(g) == emitted);
        REQUIRE(g.curves.size() == f.curves.size());
        for (std::size_t i = 0; i < f.curves.size(); ++i) {
            CHECK(g.curves[i].name == f.curves[i].name);
            REQUIRE(g.curves[i].branches.size() == f.curves[i].branches.size());
            for (std::size_t b = 0; b < f.curves[i].branches.size(); ++b) {
                CHECK(g.curves[i].branches[b].x == f.curves[i].branches[b].x);
                CHECK(g.curves[i].branches[b].y == f.curves[i].branches[b].y);
            }
        }
    }

    // random curve files round trip as well
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 10; ++k) {
        CurveFile f;
        std::uniform_int_distribution<int> nc(1, 3), nb(1, 2), ne(1, 4);
        int curves = nc(rng);
        for (int c = 0; c < curves; ++c) {
            NamedCurve cur;
            cur.name = "c" + std::to_string(c);
            int branches = nb(rng);
            for (int b = 0; b < branches; ++b) {
                BranchSpec sp;
                std::uniform_int_distribution<Exp> ed(1, 9);
                int terms = ne(rng);
                for (int t = 0; t < terms; ++t) {
                    G v = oracle::random_small(rng, false);
                    sp.x[ed(rng)] = v;
                    sp.y[ed(rng)] = oracle::random_small(rng, false);
                }
                cur.branches.push_back(sp);
            }
            f.curves.push_back(cur);
        }
        CurveFile g = parse_curve_file(emit_curve_file(f));
        CHECK(emit_curve_file(g) == emit_curve_file(f));
    }
}

TEST_CASE("conjugate file closes over the format") {
    CurveFile f = parse_curve_file(slurp("corpus/curves.json"));
    CurveFile c = conjugate_file(f);
    CurveFile re = parse_curve_file(emit_curve_file(c));
    CHECK(re.curves.size() == f.curves.size());
    const NamedCurve* gc = re.find("gauss_cusp");
    REQUIRE(gc != nullptr);
    CHECK(gc->branches[0].y.at(5) == G::i());
    // double conjugation is the identity on the file
    CHECK(emit_curve_file(conjugate_file(c)) == emit_curve_file(f));
}

TEST_CASE("dispatch: invariants of the moduli family") {
    CurveFile f = parse_curve_file(slurp("corpus/moduli.json"));
    DispatchOptions opt;
    opt.command = "invariants";
    opt.curve = "gamma_half";
    Report r = dispatch(opt, f);
    CHECK(r.status == 0);
    const Json& b = r.body["curves"][0]["branches"][0];
    CHECK(b["semigroup"]["generators"] == Json::array({4, 9}));
    CHECK(b["semigroup"]["conductor"] == 24);
    CHECK(b["zariski"] == 10);
    CHECK(b["char_exponents"] == Json::array({4, 9}));
}

TEST_CASE("dispatch: equivalence decisions") {
    CurveFile f = parse_curve_file(slurp("corpus/ephraim.json"));
    DispatchOptions opt;
    opt.command = "equiv";
    opt.left = "E1";
    opt.right = "E2";
    opt.kind = "analytic";
    Report r = dispatch(opt, f);
    CHECK(r.status == 0);
    CHECK(r.body["decisions"][0]["equivalent"] == false);

    opt.kind = "topological";
    Report rt = dispatch(opt, f);
    CHECK(rt.status == 0);
    CHECK(rt.body["decisions"][0]["equivalent"] == true);
}

TEST_CASE("dispatch: reports are byte deterministic") {
    CurveFile f = parse_curve_file(slurp("corpus/moduli.json"));
    DispatchOptions opt;
    opt.command = "normal-form";
    opt.curve = "gamma_i";
    Report r1 = dispatch(opt, f);
    Report r2 = dispatch(opt, f);
    CHECK(emit_report(r1, true) == emit_report(r2, true));
    CHECK(emit_report(r1, false) == emit_report(r2, false));
    // report JSON round-trips structurally
    CHECK(Json::parse(emit_report(r1, true)) == r1.body);
}

TEST_CASE("dispatch: error statuses") {
    CurveFile f = parse_curve_file(slurp("corpus/curves.json"));
    DispatchOptions opt;
    opt.command = "equiv";
    opt.left = "cusp";
    opt.right = "nonexistent";
    CHECK(dispatch(opt, f).status == kInputError);

    opt.right = "cusp_and_tangent_line";
    opt.kind = "smooth";
    CHECK(dispatch(opt, f).status == kUnsupported);

    opt.right = "cusp25";
    opt.kind = "analytic";
    DispatchOptions low = opt;
    low.precision = 4;
    CHECK(dispatch(low, f).status == kPrecisionExhausted);

    DispatchOptions bad;
    bad.command = "unknown";
    CHECK(dispatch(bad, f).status == kInputError);
}

TEST_CASE("dispatch: conjugate emits a curve file") {
    CurveFile f = parse_curve_file(slurp("corpus/moduli.json"));
    DispatchOptions opt;
    opt.command = "conjugate";
    Report r = dispatch(opt, f);
    CHECK(r.status == 0);
    CurveFile back = parse_curve_file(r.body.dump());
    const NamedCurve* gi = back.find("gamma_i");
    REQUIRE(gi != nullptr);
    CHECK(gi->branches[0].y.at(15) == -G::i());
}

TEST_CASE("dispatch: intersect and rigidity") {
    CurveFile f = parse_curve_file(slurp("corpus/curves.json"));
    DispatchOptions opt;
    opt.command = "intersect";
    opt.curve = "cusp_and_tangent_line";
    Report r = dispatch(opt, f);
    CHECK(r.status == 0);
    CHECK(r.body["intersections"]["matrix"][0][1] == 3);

    DispatchOptions rg;
    rg.command = "rigidity";
    rg.v0 = 2;
    rg.v1 = 3;
    rg.samples = 300;
    rg.seed = 7;
    Report rr = dispatch(rg, CurveFile{});
    CHECK(rr.status == 0);
    CHECK(rr.body["rigidity"]["family_checked"] >= 2);
    CHECK(rr.body["rigidity"]["random_rejected"].get<std::size_t>() > 0);
}
