#pragma once

// Distribution files and report serialization.
//
// Distribution file (JSON):  {"d": 2, "probs": [p00, p01, p10, p11]}
// with probs in lexicographic (i, j) order, index i*d + j.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "stabexp/codes.hpp"
#include "stabexp/error.hpp"
#include "stabexp/exponent.hpp"
#include "stabexp/types.hpp"

namespace stabexp {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline NoiseDistribution parse_distribution(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("distribution file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("d") || !doc.contains("probs"))
        throw parse_error("distribution file needs fields \"d\" and \"probs\"");
    if (!doc["d"].is_number_integer() || doc["d"].get<long long>() < 2)
        throw parse_error("\"d\" must be an integer >= 2");
    if (!doc["probs"].is_array()) throw parse_error("\"probs\" must be an array");
    std::vector<double> probs;
    for (const auto& v : doc["probs"]) {
        if (!v.is_number()) throw parse_error("\"probs\" entries must be numbers");
        const double p = v.get<double>();
        if (p < 0.0) throw parse_error("\"probs\" entries must be nonnegative");
        probs.push_back(p);
    }
    try {
        return NoiseDistribution(static_cast<Residue>(doc["d"].get<long long>()), std::move(probs));
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }
}

inline NoiseDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open distribution file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_distribution(buf.str());
}

inline nlohmann::json to_json(const NoiseDistribution& p) {
    return {{"d", p.d()}, {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
}

// 12 significant digits.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void write_curve_csv(std::ostream& out, std::span<const ExponentPoint> points) {
    out << "R,E,regime,delta_star\n";
    for (const auto& pt : points)
        out << format_number(pt.rate) << ',' << format_number(pt.exponent) << ',' << to_string(pt.regime) << ','
            << format_number(pt.delta_star) << '\n';
}

inline nlohmann::json to_json(const ExponentPoint& pt) {
    return {{"R", pt.rate}, {"E", pt.exponent}, {"regime", to_string(pt.regime)}, {"delta_star", pt.delta_star}};
}

inline nlohmann::json to_json(const Thresholds& t) {
    return {{"R0", t.R0}, {"R1", t.R1}, {"hashing_bound", t.hashing_bound}};
}

inline nlohmann::json to_json(const EnsembleReport& r) {
    return {{"n", r.n},
            {"k", r.k},
            {"d", r.d},
            {"channel", to_json(r.P)},
            {"avg_failure", r.avg_failure},
            {"std_error", r.std_error},
            {"intermediate_bound", r.intermediate_bound},
            {"theorem_bound_rhs", r.theorem_bound_rhs},
            {"mode", to_string(r.mode)},
            {"sample_count", r.sample_count},
            {"seed", r.seed},
            {"ensemble_size", r.ensemble_size},
            {"chain_holds", r.chain_holds()}};
}

inline std::string coordinates(const SymplecticVector& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(x[i]);
    }
    return s;
}

}  // namespace stabexp
