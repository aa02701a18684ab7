#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "curvesing/curves.hpp"
#include "curvesing/rigidity.hpp"

namespace curvesing {

using Json = nlohmann::json;

// On-disk model: named curves, each branch given as exponent-coefficient pair
// lists for x and y with coefficients in the exact grammar.
struct BranchSpec {
    std::map<Exp, GaussianRational> x, y;
};

struct NamedCurve {
    std::string name;
    std::vector<BranchSpec> branches;
};

struct CurveFile {
    std::vector<NamedCurve> curves;

    const NamedCurve* find(const std::string& name) const {
        for (const NamedCurve& c : curves)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline std::map<Exp, GaussianRational> parse_pairs(const Json& arr, const std::string& path) {
    if (!arr.is_array()) throw ValidationError("expected an array of [exponent, coefficient] pairs", path);
    std::map<Exp, GaussianRational> out;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        std::string ppath = path + "[" + std::to_string(k) + "]";
        const Json& pair = arr[k];
        if (!pair.is_array() || pair.size() != 2)
            throw ValidationError("expected a two-element [exponent, coefficient] pair", ppath);
        if (!pair[0].is_number_integer() || pair[0].get<std::int64_t>() <= 0)
            throw ValidationError("exponent must be a strictly positive integer", ppath);
        if (!pair[1].is_string())
            throw ValidationError("coefficient must be a string in the exact grammar", ppath);
        Exp e = pair[0].get<std::int64_t>();
        GaussianRational c;
        try {
            c = parse_coeff(pair[1].get<std::string>());
        } catch (const ParseError& err) {
            throw ParseError(err.what(), ppath);
        }
        if (c.is_zero()) throw ValidationError("zero coefficients must be omitted", ppath);
        if (!out.emplace(e, c).second)
            throw ValidationError("duplicate exponent " + std::to_string(e), ppath);
    }
    return out;
}

} // namespace detail

inline CurveFile parse_curve_file(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& err) {
        auto [line, col] = detail::line_col(text, err.byte > 0 ? err.byte - 1 : 0);
        throw ParseError(std::string("invalid JSON: ") + err.what(), line, col);
    }
    if (!root.is_object() || !root.contains("curves"))
        throw ValidationError("top level must be an object with a 'curves' array", "$");
    for (const auto& [key, value] : root.items())
        if (key != "curves") throw ValidationError("unknown key '" + key + "'", "$");
    const Json& curves = root["curves"];
    if (!curves.is_array()) throw ValidationError("'curves' must be an array", "$.curves");

    CurveFile out;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        std::string cpath = "$.curves[" + std::to_string(i) + "]";
        const Json& jc = curves[i];
        if (!jc.is_object()) throw ValidationError("curve must be an object", cpath);
        for (const auto& [key, value] : jc.items())
            if (key != "name" && key != "branches")
                throw ValidationError("unknown key '" + key + "'", cpath);
        if (!jc.contains("name") || !jc["name"].is_string() || jc["name"].get<std::string>().empty())
            throw ValidationError("curve needs a non-empty string 'name'", cpath);
        NamedCurve nc;
        nc.name = jc["name"].get<std::string>();
        if (out.find(nc.name)) throw ValidationError("duplicate curve name '" + nc.name + "'", cpath);
        if (!jc.contains("branches") || !jc["branches"].is_array() || jc["branches"].empty())
            throw ValidationError("curve needs a non-empty 'branches' array", cpath);
        const Json& jb = jc["branches"];
        for (std::size_t b = 0; b < jb.size(); ++b) {
            std::string bpath = cpath + ".branches[" + std::to_string(b) + "]";
            const Json& br = jb[b];
            if (!br.is_object()) throw ValidationError("branch must be an object", bpath);
            for (const auto& [key, value] : br.items())
                if (key != "x" && key != "y") throw ValidationError("unknown key '" + key + "'", bpath);
            BranchSpec spec;
            spec.x = br.contains("x") ? detail::parse_pairs(br["x"], bpath + ".x")
                                      : std::map<Exp, GaussianRational>{};
            spec.y = br.contains("y") ? detail::parse_pairs(br["y"], bpath + ".y")
                                      : std::map<Exp, GaussianRational>{};
            if (spec.x.empty() && spec.y.empty())
                throw ValidationError("branch components must not both be zero", bpath);
            nc.branches.push_back(std::move(spec));
        }
        out.curves.push_back(std::move(nc));
    }
    return out;
}

namespace detail {

inline Json pairs_json(const std::map<Exp, GaussianRational>& m) {
    Json arr = Json::array();
    for (const auto& [e, c] : m) arr.push_back(Json::array({e, render_coeff(c)}));
    return arr;
}

} // namespace detail

inline Json curve_file_json(const CurveFile& f) {
    Json curves = Json::array();
    for (const NamedCurve& c : f.curves) {
        Json branches = Json::array();
        for (const BranchSpec& b : c.branches)
            branches.push_back(Json{{"x", detail::pairs_json(b.x)}, {"y", detail::pairs_json(b.y)}});
        curves.push_back(Json{{"name", c.name}, {"branches", branches}});
    }
    return Json{{"curves", curves}};
}

inline std::string emit_curve_file(const CurveFile& f) { return curve_file_json(f).dump(2) + "\n"; }

inline CurveSet to_curve_set(const NamedCurve& c) {
    CurveSet out;
    out.name = c.name;
    for (const BranchSpec& b : c.branches) out.branches.push_back(BranchParam::from_polys(b.x, b.y));
    validate_curve_set(out);
    return out;
}

inline CurveFile conjugate_file(const CurveFile& f) {
    CurveFile out;
    for (const NamedCurve& c : f.curves) {
        NamedCurve cc;
        cc.name = c.name;
        for (const BranchSpec& b : c.branches) {
            BranchSpec cb;
            for (const auto& [e, v] : b.x) cb.x.emplace(e, v.conj());
            for (const auto& [e, v] : b.y) cb.y.emplace(e, v.conj());
            cc.branches.push_back(std::move(cb));
        }
        out.curves.push_back(std::move(cc));
    }
    return out;
}

} // namespace curvesing
