// curvesing: exact invariants and equivalence decisions for parametrized
// plane curve singularities.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "curvesing/report.hpp"

namespace {

struct CliState {
    std::string file;
    bool json = false;
    std::int64_t precision = 0;
    curvesing::DispatchOptions opt;
};

int run(CliState& st, bool needs_file) {
    using namespace curvesing;
    if (st.precision > 0) st.opt.precision = st.precision;
    CurveFile file;
    if (needs_file || !st.file.empty()) {
        std::ifstream in(st.file);
        if (!in) {
            Report rep;
            rep.status = kInputError;
            rep.body["command"] = st.opt.command;
            rep.body["error"] = "cannot open file '" + st.file + "'";
            rep.body["status"] = rep.status;
            std::cout << emit_report(rep, st.json);
            return rep.status;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            file = parse_curve_file(buf.str());
        } catch (const Error& e) {
            Report rep;
            rep.status = kInputError;
            rep.body["command"] = st.opt.command;
            rep.body["error"] = e.what();
            rep.body["status"] = rep.status;
            std::cout << emit_report(rep, st.json);
            return rep.status;
        }
    }
    Report rep = dispatch(st.opt, file);
    std::cout << emit_report(rep, st.json);
    return rep.status;
}

void add_common(CLI::App* sub, CliState& st, bool file_required) {
    auto* f = sub->add_option("file", st.file, "curve file (JSON)");
    if (file_required) f->required();
    sub->add_flag("--json", st.json, "emit the report as JSON");
    sub->add_option("--precision", st.precision,
                    "working precision override (default: derived per branch)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact invariants and equivalence of parametrized plane curve singularities"};
    app.require_subcommand(1);

    CliState st;

    auto* inv = app.add_subcommand("invariants",
                                   "semigroup, characteristic exponents, differential values");
    add_common(inv, st, true);
    inv->add_option("--curve", st.opt.curve, "restrict to one named curve");
    inv->callback([&] {
        st.opt.command = "invariants";
        std::exit(run(st, true));
    });

    auto* nf = app.add_subcommand("normal-form", "reduce branches to their normal form");
    add_common(nf, st, true);
    nf->add_option("--curve", st.opt.curve, "restrict to one named curve");
    nf->callback([&] {
        st.opt.command = "normal-form";
        std::exit(run(st, true));
    });

    auto* eq = app.add_subcommand("equiv", "decide equivalence of two named curves");
    add_common(eq, st, true);
    eq->add_option("--left", st.opt.left, "left curve name")->required();
    eq->add_option("--right", st.opt.right, "right curve name")->required();
    eq->add_option("--kind", st.opt.kind, "analytic | smooth | topological")
        ->check(CLI::IsMember({"analytic", "smooth", "topological"}));
    eq->callback([&] {
        st.opt.command = "equiv";
        std::exit(run(st, true));
    });

    auto* cj = app.add_subcommand("conjugate", "emit the curve file with conjugated coefficients");
    add_common(cj, st, true);
    cj->add_option("--curve", st.opt.curve, "restrict to one named curve");
    cj->callback([&] {
        st.opt.command = "conjugate";
        st.json = true; // output is itself a curve file
        std::exit(run(st, true));
    });

    auto* is = app.add_subcommand("intersect", "pairwise intersection multiplicities");
    add_common(is, st, true);
    is->add_option("--curve", st.opt.curve, "matrix within one curve");
    is->add_option("--left", st.opt.left, "left curve name");
    is->add_option("--right", st.opt.right, "right curve name");
    is->callback([&] {
        st.opt.command = "intersect";
        std::exit(run(st, true));
    });

    auto* rg = app.add_subcommand("rigidity",
                                  "certify the linear rigidity constraint at a multiplicity pair");
    add_common(rg, st, false);
    rg->add_option("--v0", st.opt.v0, "multiplicity v0 (>= 2)")->required();
    rg->add_option("--v1", st.opt.v1, "exponent v1 (coprime, > v0)")->required();
    rg->add_option("--samples", st.opt.samples, "random sweep size (default 10000)");
    rg->add_option("--seed", st.opt.seed, "random seed");
    rg->callback([&] {
        st.opt.command = "rigidity";
        std::exit(run(st, false));
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
