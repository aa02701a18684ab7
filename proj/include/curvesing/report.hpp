#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvesing/curve_file.hpp"

namespace curvesing {

// Exit statuses shared by the library dispatcher and the command-line tool.
enum ExitStatus : int {
    kOk = 0,
    kInternal = 1,
    kInputError = 2,
    kPrecisionExhausted = 3,
    kUnsupported = 4,
};

struct DispatchOptions {
    std::string command; // invariants | normal-form | equiv | conjugate | intersect | rigidity
    std::optional<std::string> curve;
    std::optional<std::string> left, right;
    std::string kind = "analytic";
    std::optional<Exp> precision;
    std::int64_t v0 = 0, v1 = 0; // rigidity
    std::size_t samples = 10000;
    std::uint64_t seed = 20240901;
};

struct Report {
    Json body = Json::object();
    int status = kOk;
};

namespace detail {

inline Json scaling_json(const ScalingCertificate& sc) {
    Json bez = Json::array();
    for (const auto& [e, c] : sc.bezout) bez.push_back(Json::array({e, c}));
    Json j{{"g", sc.g}, {"ratio_power", render_coeff(sc.ratio_power)}, {"bezout", bez}};
    j["ratio"] = sc.ratio ? Json(render_coeff(*sc.ratio)) : Json(nullptr);
    return j;
}

inline Json certificate_json(const EquivalenceCertificate& c) {
    return Json{{"v0", c.v0},
                {"v1", c.v1},
                {"window_end", c.window_end},
                {"left_steps", c.left.steps.size()},
                {"right_steps", c.right.steps.size()},
                {"scaling", scaling_json(c.scaling)}};
}

inline Json branch_json(const BranchParam& b, std::optional<Exp> precision, bool with_normal_form) {
    BranchAnalysis a = analyze(b, precision);
    Json j;
    j["v0"] = a.smooth ? 1 : a.nb.v0;
    j["smooth"] = a.smooth;
    j["precision"] = a.precision_used;
    j["semigroup"] = Json{{"generators", a.gamma.sg.generators},
                          {"conductor", a.gamma.sg.conductor},
                          {"bound", a.gamma.sg.bound}};
    j["char_exponents"] = a.char_exps;
    if (!a.smooth) {
        j["lambda_values"] =
            Json{{"members", a.lambda->values.members}, {"bound", a.lambda->values.bound}};
        j["zariski"] = a.zariski ? Json(*a.zariski) : Json(nullptr);
        j["monomial_class"] = a.monomial_class;
        if (with_normal_form) {
            NormalFormData nf = eliminate(a);
            j["normal_form"] = Json{{"v0", nf.v0},
                                    {"v1", nf.v1},
                                    {"lambda", nf.lambda ? Json(*nf.lambda) : Json(nullptr)},
                                    {"coeffs", pairs_json(nf.coeffs)},
                                    {"lambda_normalized", nf.lambda_normalized}};
        }
    }
    return j;
}

inline const NamedCurve& pick(const CurveFile& file, const std::string& name) {
    const NamedCurve* c = file.find(name);
    if (!c) throw ValidationError("no curve named '" + name + "' in the input file", name);
    return *c;
}

inline Json matrix_json(const std::vector<std::vector<std::int64_t>>& m) {
    Json rows = Json::array();
    for (const auto& row : m) rows.push_back(row);
    return rows;
}

} // namespace detail

// Runs one command against a parsed curve file and assembles the
// machine-readable report.  All typed errors are mapped onto the documented
// exit statuses and recorded in the report body.
inline Report dispatch(const DispatchOptions& opt, const CurveFile& file) {
    Report rep;
    rep.body["command"] = opt.command;
    if (opt.precision) rep.body["precision_override"] = *opt.precision;

    auto selected = [&]() -> std::vector<const NamedCurve*> {
        std::vector<const NamedCurve*> out;
        if (opt.curve) {
            out.push_back(&detail::pick(file, *opt.curve));
        } else {
            for (const NamedCurve& c : file.curves) out.push_back(&c);
        }
        return out;
    };

    try {
        if (opt.command == "invariants" || opt.command == "normal-form") {
            bool with_nf = opt.command == "normal-form";
            Json curves = Json::array();
            for (const NamedCurve* nc : selected()) {
                CurveSet cs = to_curve_set(*nc);
                Json branches = Json::array();
                for (const BranchParam& b : cs.branches)
                    branches.push_back(detail::branch_json(b, opt.precision, with_nf));
                curves.push_back(Json{{"name", nc->name}, {"branches", branches}});
            }
            rep.body["curves"] = curves;
        } else if (opt.command == "equiv") {
            if (!opt.left || !opt.right)
                throw ValidationError("equiv requires --left and --right curve names", "equiv");
            CurveSet c1 = to_curve_set(detail::pick(file, *opt.left));
            CurveSet c2 = to_curve_set(detail::pick(file, *opt.right));
            Json d{{"kind", opt.kind}, {"left", *opt.left}, {"right", *opt.right}};
            if (opt.kind == "analytic") {
                if (c1.branches.size() != 1 || c2.branches.size() != 1)
                    throw UnsupportedMultiBranch();
                EquivalenceDecision dec =
                    analytic_equivalent(c1.branches.front(), c2.branches.front(), opt.precision);
                d["equivalent"] = dec.equivalent;
                if (!dec.equivalent) d["reason"] = dec.reason;
                if (dec.certificate) d["certificate"] = detail::certificate_json(*dec.certificate);
            } else if (opt.kind == "smooth") {
                SmoothDecision dec = smooth_equivalent(c1, c2, opt.precision);
                d["equivalent"] = dec.equivalent;
                d["via_conjugate"] = dec.via_conjugate;
                if (dec.certificate) d["certificate"] = detail::certificate_json(*dec.certificate);
            } else if (opt.kind == "topological") {
                TopologicalDecision dec = topologically_equivalent(c1, c2, opt.precision);
                d["equivalent"] = dec.equivalent;
                if (dec.bijection) d["bijection"] = *dec.bijection;
                if (!dec.equivalent) d["reason"] = dec.reason;
            } else {
                throw ValidationError("unknown --kind '" + opt.kind + "'", "equiv");
            }
            rep.body["decisions"] = Json::array({d});
        } else if (opt.command == "conjugate") {
            CurveFile out;
            if (opt.curve) {
                out.curves.push_back(detail::pick(file, *opt.curve));
                out = conjugate_file(out);
            } else {
                out = conjugate_file(file);
            }
            rep.body = curve_file_json(out);
        } else if (opt.command == "intersect") {
            if (opt.left && opt.right) {
                CurveSet c1 = to_curve_set(detail::pick(file, *opt.left));
                CurveSet c2 = to_curve_set(detail::pick(file, *opt.right));
                std::vector<std::vector<std::int64_t>> m(
                    c1.branches.size(), std::vector<std::int64_t>(c2.branches.size(), 0));
                for (std::size_t i = 0; i < c1.branches.size(); ++i)
                    for (std::size_t j = 0; j < c2.branches.size(); ++j)
                        m[i][j] = intersection_multiplicity(c1.branches[i], c2.branches[j]);
                rep.body["intersections"] = Json{{"left", *opt.left},
                                                 {"right", *opt.right},
                                                 {"matrix", detail::matrix_json(m)}};
            } else if (opt.curve) {
                CurveSet cs = to_curve_set(detail::pick(file, *opt.curve));
                rep.body["intersections"] =
                    Json{{"curve", *opt.curve},
                         {"matrix", detail::matrix_json(intersection_matrix(cs))}};
            } else {
                throw ValidationError("intersect requires --curve or --left/--right", "intersect");
            }
        } else if (opt.command == "rigidity") {
            RigiditySearch search = solve_constraints(opt.v0, opt.v1, opt.samples, opt.seed);
            Json sols = Json::array();
            for (const LinearTaylorMap& m : search.solutions) {
                sols.push_back(Json{{"alpha", render_coeff(m.alpha)},
                                    {"alpha_prime", render_coeff(m.alpha_p)},
                                    {"beta", render_coeff(m.beta)},
                                    {"beta_prime", render_coeff(m.beta_p)},
                                    {"class", classify_linear_map(m) == MapClass::Holomorphic
                                                  ? "holomorphic"
                                                  : "antiholomorphic"}});
            }
            rep.body["rigidity"] = Json{{"v0", opt.v0},
                                        {"v1", opt.v1},
                                        {"samples", opt.samples},
                                        {"seed", opt.seed},
                                        {"family_checked", search.family_checked},
                                        {"random_rejected", search.random_rejected},
                                        {"random_family_hits", search.random_family_hits},
                                        {"solutions", sols}};
        } else {
            throw ValidationError("unknown command '" + opt.command + "'", opt.command);
        }
    } catch (const ParseError& e) {
        rep.body["error"] = e.what();
        rep.status = kInputError;
    } catch (const ValidationError& e) {
        rep.body["error"] = e.what();
        rep.status = kInputError;
    } catch (const PrecisionExhausted& e) {
        rep.body["error"] = e.what();
        rep.status = kPrecisionExhausted;
    } catch (const NotFinitelyDetermined& e) {
        rep.body["error"] = e.what();
        rep.status = kPrecisionExhausted;
    } catch (const UnsupportedSmoothBranches& e) {
        rep.body["error"] = e.what();
        rep.status = kUnsupported;
    } catch (const UnsupportedMultiBranch& e) {
        rep.body["error"] = e.what();
        rep.status = kUnsupported;
    } catch (const TooManyBranches& e) {
        rep.body["error"] = e.what();
        rep.status = kUnsupported;
    } catch (const NonPolynomialInput& e) {
        rep.body["error"] = e.what();
        rep.status = kUnsupported;
    } catch (const SameBranch& e) {
        rep.body["error"] = e.what();
        rep.status = kUnsupported;
    } catch (const EliminationStuck& e) {
        rep.body["error"] = e.what();
        rep.status = kUnsupported;
    } catch (const RefutationFailure& e) {
        rep.body["error"] = e.what();
        rep.status = kInternal;
    } catch (const Error& e) {
        rep.body["error"] = e.what();
        rep.status = kInternal;
    }
    // conjugate output doubles as a curve file and must stay parseable
    if (opt.command != "conjugate" || rep.status != kOk) rep.body["status"] = rep.status;
    return rep;
}

namespace detail {

inline void render_text(const Json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_text(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        bool scalar = true;
        for (const auto& v : j)
            if (v.is_object() || v.is_array()) scalar = false;
        if (scalar) {
            out += prefix + ": " + j.dump() + "\n";
        } else {
            std::size_t idx = 0;
            for (const auto& v : j) render_text(v, prefix + "[" + std::to_string(idx++) + "]", out);
        }
    } else {
        out += prefix + ": " + j.dump() + "\n";
    }
}

} // namespace detail

// Deterministic serialization: keys sorted (object storage order), fixed
// indentation, canonical coefficient rendering.
inline std::string emit_report(const Report& r, bool json_format) {
    if (json_format) return r.body.dump(2) + "\n";
    std::string out;
    detail::render_text(r.body, "", out);
    return out;
}

} // namespace curvesing
