#pragma once

// Command-line front end. parse_arguments() fills a RunConfig, run() executes
// it and returns the process exit status:
//   0 success, 2 parse/config error, 3 instance too large,
//   4 invariant violation, 5 I/O failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stabexp/codes.hpp"
#include "stabexp/error.hpp"
#include "stabexp/exponent.hpp"
#include "stabexp/io.hpp"
#include "stabexp/pauli.hpp"
#include "stabexp/symplectic.hpp"

namespace stabexp::cli {

enum ExitCode : int { kOk = 0, kParseError = 2, kTooLarge = 3, kInvariant = 4, kIoError = 5 };

enum class Format { csv, json };

struct RateGrid {
    double start = 0.0;
    double stop = 0.95;
    double step = 0.01;

    std::vector<double> points() const {
        std::vector<double> r;
        const auto count = static_cast<std::uint64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::uint64_t i = 0; i < count; ++i) r.push_back(start + static_cast<double>(i) * step);
        return r;
    }
};

struct RunConfig {
    std::string command;
    std::optional<Residue> d;
    std::optional<double> epsilon;
    std::optional<std::string> dist_path;
    std::optional<std::uint64_t> n;
    std::optional<std::uint64_t> k;
    RateGrid rates;
    EnsembleMode mode = EnsembleMode::exhaustive;
    std::uint64_t samples = 1000;
    std::uint64_t seed = 0;
    std::uint64_t trials = 50;  // code states per member in verify-stabilizer
    std::optional<std::string> output;
    Format format = Format::csv;
};

inline RateGrid parse_rate_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw parse_error("bad --rates component '" + item + "'");
        }
    }
    if (parts.size() != 3) throw parse_error("--rates expects start:stop:step");
    RateGrid g{parts[0], parts[1], parts[2]};
    if (!(g.step > 0.0)) throw parse_error("--rates step must be positive");
    if (!(0.0 <= g.start && g.start <= g.stop && g.stop < 1.0)) throw parse_error("--rates needs 0 <= start <= stop < 1");
    return g;
}

// Throws parse_error on bad input. Returns nullopt when help was printed.
inline std::optional<RunConfig> parse_arguments(int argc, const char* const* argv, std::ostream& out = std::cout) {
    CLI::App app{"Error exponents and random symplectic code checks for Pauli-mixture channels", "stabexp"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::optional<unsigned> d;
    std::string rates, mode = "exhaustive", format = "csv";
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"exponent-curve", "E(R,P) over a rate grid (CSV: R,E,regime,delta_star)"},
        {"thresholds", "R0 (hashing bound) and R1 of the channel"},
        {"simulate", "ensemble-average failure of random symplectic codes"},
        {"verify-counting", "check |A(x)|/|A| <= d^-(n-k) for every x != 0"},
        {"verify-theorem", "check avg failure <= type-sum bound <= theorem bound"},
        {"verify-stabilizer", "dense-matrix check of syndrome recovery"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--d", d, "field size (prime)");
        sub->add_option("--epsilon", cfg.epsilon, "depolarizing parameter");
        sub->add_option("--dist", cfg.dist_path, "distribution file (JSON with d and probs)");
        sub->add_option("--n", cfg.n, "code length");
        sub->add_option("--k", cfg.k, "code dimension exponent");
        sub->add_option("--rates", rates, "rate grid start:stop:step");
        sub->add_option("--mode", mode, "exhaustive or sampled");
        sub->add_option("--samples", cfg.samples, "ensemble samples in sampled mode");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--trials", cfg.trials, "random code states per check (verify-stabilizer)");
        sub->add_option("--output", cfg.output, "output file (default stdout)");
        sub->add_option("--format", format, "csv or json");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw parse_error(e.what());
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (d) cfg.d = static_cast<Residue>(*d);
    if (!rates.empty()) cfg.rates = parse_rate_grid(rates);
    if (mode == "exhaustive")
        cfg.mode = EnsembleMode::exhaustive;
    else if (mode == "sampled")
        cfg.mode = EnsembleMode::sampled;
    else
        throw parse_error("--mode must be exhaustive or sampled");
    if (format == "csv")
        cfg.format = Format::csv;
    else if (format == "json")
        cfg.format = Format::json;
    else
        throw parse_error("--format must be csv or json");
    if (cfg.mode == EnsembleMode::sampled && cfg.samples == 0) throw parse_error("--samples must be >= 1");
    return cfg;
}

namespace detail {

inline NoiseDistribution channel_of(const RunConfig& cfg) {
    if (cfg.dist_path && cfg.epsilon) throw parse_error("give either --dist or --epsilon, not both");
    if (cfg.dist_path) {
        auto p = load_distribution(*cfg.dist_path);
        if (cfg.d && *cfg.d != p.d()) throw parse_error("--d disagrees with the distribution file");
        return p;
    }
    if (!cfg.epsilon) throw parse_error("a channel is required: --epsilon (with --d) or --dist");
    try {
        return depolarizing(cfg.d.value_or(2), *cfg.epsilon);
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }
}

inline std::pair<std::uint64_t, std::uint64_t> code_shape(const RunConfig& cfg) {
    if (!cfg.n || !cfg.k) throw parse_error("--n and --k are required");
    if (*cfg.n == 0 || *cfg.k > *cfg.n) throw parse_error("need n >= 1 and 0 <= k <= n");
    return {*cfg.n, *cfg.k};
}

inline nlohmann::json header(const RunConfig& cfg) {
    return {{"tool", "stabexp"}, {"version", kToolVersion}, {"command", cfg.command}, {"seed", cfg.seed}};
}

struct Artifact {
    Artifact() = default;
    explicit Artifact(std::string t) : text(std::move(t)) {}

    std::string text;
    bool violated = false;
    std::string diagnostic;
};

inline Artifact exponent_curve(const RunConfig& cfg) {
    const auto p = channel_of(cfg);
    std::vector<ExponentPoint> points;
    for (double r : cfg.rates.points()) {
        const auto pw = exponent_piecewise(r, p);
        const auto ga = exponent_gallager(r, p);
        if (std::abs(pw.exponent - ga.exponent) > 1e-9)
            throw invariant_violation("piecewise and Gallager exponents disagree at R=" + format_number(r));
        if (!points.empty() && pw.exponent > points.back().exponent + 1e-12)
            throw invariant_violation("exponent increases at R=" + format_number(r));
        points.push_back(pw);
    }
    std::ostringstream out;
    if (cfg.format == Format::csv) {
        write_curve_csv(out, points);
    } else {
        auto doc = header(cfg);
        doc["channel"] = to_json(p);
        doc["thresholds"] = to_json(thresholds(p));
        doc["points"] = nlohmann::json::array();
        for (const auto& pt : points) doc["points"].push_back(to_json(pt));
        out << doc.dump(2) << '\n';
    }
    return Artifact(out.str());
}

inline Artifact thresholds_cmd(const RunConfig& cfg) {
    const auto p = channel_of(cfg);
    const auto t = thresholds(p);
    std::ostringstream out;
    if (cfg.format == Format::csv) {
        out << "R0,R1,hashing_bound\n"
            << format_number(t.R0) << ',' << format_number(t.R1) << ',' << format_number(t.hashing_bound) << '\n';
    } else {
        auto doc = header(cfg);
        doc["channel"] = to_json(p);
        doc.update(to_json(t));
        out << doc.dump(2) << '\n';
    }
    return Artifact(out.str());
}

inline std::string report_text(const RunConfig& cfg, const nlohmann::json& body) {
    auto doc = header(cfg);
    doc.update(body);
    if (cfg.format == Format::json) return doc.dump(2) + "\n";
    // Flat key,value listing of the scalar fields.
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [key, value] : doc.items()) {
        if (value.is_structured()) continue;
        out << key << ',';
        if (value.is_number_float())
            out << format_number(value.get<double>());
        else if (value.is_string())
            out << value.get<std::string>();
        else
            out << value.dump();
        out << '\n';
    }
    return out.str();
}

inline Artifact simulate(const RunConfig& cfg) {
    const auto p = channel_of(cfg);
    const auto [n, k] = code_shape(cfg);
    const auto rep = ensemble_average_failure(n, k, p, cfg.mode, cfg.samples, cfg.seed);
    return Artifact(report_text(cfg, to_json(rep)));
}

inline Artifact verify_counting(const RunConfig& cfg) {
    if (!cfg.d) throw parse_error("--d is required");
    const auto [n, k] = code_shape(cfg);
    const Residue d = *cfg.d;
    const auto ensemble = enumerate_isotropic(n, n - k, d);
    const auto counts = counting_counts(ensemble, n, d);
    const std::uint64_t total = ensemble.size();
    const std::uint64_t scale = checked_pow(d, n - k);

    std::uint64_t max_count = 0;
    bool holds = counts[0] == 0;
    for (std::uint64_t idx = 1; idx < counts.size(); ++idx) {
        max_count = std::max(max_count, counts[idx]);
        holds = holds && CountRatio{counts[idx], total}.at_most_inverse_power(d, n - k);
    }
    const double max_ratio = CountRatio{max_count, total}.value();
    const double bound = 1.0 / static_cast<double>(scale);

    std::ostringstream out;
    if (cfg.format == Format::csv) {
        out << "x,count,total,ratio,bound\n";
        for (std::uint64_t idx = 0; idx < counts.size(); ++idx)
            out << coordinates(SymplecticVector::from_index(idx, n, d)) << ',' << counts[idx] << ',' << total << ','
                << format_number(CountRatio{counts[idx], total}.value()) << ',' << format_number(bound) << '\n';
    } else {
        auto doc = header(cfg);
        doc.update({{"n", n}, {"k", k}, {"d", d}, {"ensemble_size", total}, {"max_count", max_count},
                    {"max_ratio", max_ratio}, {"bound", bound}, {"holds", holds}});
        doc["records"] = nlohmann::json::array();
        for (std::uint64_t idx = 0; idx < counts.size(); ++idx)
            doc["records"].push_back({{"x", coordinates(SymplecticVector::from_index(idx, n, d))},
                                      {"count", counts[idx]},
                                      {"ratio", CountRatio{counts[idx], total}.value()}});
        out << doc.dump(2) << '\n';
    }
    Artifact a{out.str()};
    if (!holds) {
        a.violated = true;
        a.diagnostic = "counting bound |A(x)|/|A| <= d^-(n-k) fails";
    }
    return a;
}

inline Artifact verify_theorem(const RunConfig& cfg) {
    const auto p = channel_of(cfg);
    const auto [n, k] = code_shape(cfg);
    const auto rep = ensemble_average_failure(n, k, p, EnsembleMode::exhaustive);

    // Second route to the average: sum_x P^n(x) |B(x)| / |A|.
    const auto ensemble = enumerate_isotropic(n, n - k, p.d());
    const auto excluded = exclusion_counts(ensemble, n, p.d());
    const EntropyRanks ranks(n, p.d());
    CompensatedSum via_exclusion;
    bool per_vector = true;
    for (std::uint64_t idx = 0; idx < excluded.size(); ++idx) {
        const double ratio = CountRatio{excluded[idx], ensemble.size()}.value();
        via_exclusion += stabexp::detail::product_probability(idx, n, p) * ratio;
        per_vector = per_vector && ratio <= exclusion_bound(SymplecticVector::from_index(idx, n, p.d()), k, ranks) + 1e-15;
    }
    const bool identity = std::abs(via_exclusion.value() - rep.avg_failure) <= 1e-12;

    auto body = to_json(rep);
    body["avg_failure_via_exclusion"] = via_exclusion.value();
    body["exclusion_identity_holds"] = identity;
    body["exclusion_bounds_hold"] = per_vector;
    body["theorem_fidelity_bound"] = 1.0 - rep.theorem_bound_rhs;
    body["vacuous"] = rep.theorem_bound_rhs >= 1.0;
    Artifact a{report_text(cfg, body)};
    if (!rep.chain_holds() || !identity || !per_vector) {
        a.violated = true;
        a.diagnostic = "theorem chain avg_failure <= intermediate <= rhs fails";
    }
    return a;
}

inline Artifact verify_stabilizer(const RunConfig& cfg) {
    const auto p = channel_of(cfg);
    const auto [n, k] = code_shape(cfg);
    const Residue d = p.d();
    hilbert_dimension(n, d);

    std::vector<SymplecticSubspace> members;
    Engine rng(cfg.seed);
    if (cfg.mode == EnsembleMode::exhaustive) {
        members = enumerate_isotropic(n, n - k, d);
    } else {
        for (std::uint64_t s = 0; s < cfg.samples; ++s) members.push_back(sample_isotropic(n, n - k, d, rng));
    }
    const EntropyRanks ranks(n, d);
    double worst_overlap = 1.0, worst_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& L : members) {
        const auto code = stabilizer_code(L);
        const auto c = correctable_set(L, ranks);
        const auto r = verify_correctability(code, c, p, cfg.trials, rng);
        worst_overlap = std::min(worst_overlap, r.min_member_overlap);
        worst_margin = std::min(worst_margin, r.min_channel_fidelity - (1.0 - r.failure_probability));
        ok = ok && r.ok();
    }
    const nlohmann::json body = {{"n", n},
                                 {"k", k},
                                 {"d", d},
                                 {"channel", to_json(p)},
                                 {"mode", to_string(cfg.mode)},
                                 {"members_checked", members.size()},
                                 {"trials", cfg.trials},
                                 {"min_member_overlap", worst_overlap},
                                 {"min_fidelity_margin", worst_margin},
                                 {"holds", ok}};
    Artifact a{report_text(cfg, body)};
    if (!ok) {
        a.violated = true;
        a.diagnostic = "syndrome recovery failed to correct Gamma(L) or beat the fidelity bound";
    }
    return a;
}

inline Artifact dispatch(const RunConfig& cfg) {
    if (cfg.command == "exponent-curve") return exponent_curve(cfg);
    if (cfg.command == "thresholds") return thresholds_cmd(cfg);
    if (cfg.command == "simulate") return simulate(cfg);
    if (cfg.command == "verify-counting") return verify_counting(cfg);
    if (cfg.command == "verify-theorem") return verify_theorem(cfg);
    if (cfg.command == "verify-stabilizer") return verify_stabilizer(cfg);
    throw parse_error("unknown command " + cfg.command);
}

}  // namespace detail

inline int run(const RunConfig& cfg, std::ostream& diag = std::cerr) {
    detail::Artifact artifact;
    try {
        artifact = detail::dispatch(cfg);
    } catch (const parse_error& e) {
        diag << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const instance_too_large& e) {
        diag << "error: instance too large: " << e.what() << '\n';
        return kTooLarge;
    } catch (const invariant_violation& e) {
        diag << "error: invariant violated: " << e.what() << '\n';
        return kInvariant;
    } catch (const std::invalid_argument& e) {
        diag << "error: " << e.what() << '\n';
        return kParseError;
    }

    if (cfg.output) {
        std::ofstream out(*cfg.output, std::ios::binary | std::ios::trunc);
        if (!out || !(out << artifact.text) || !out.flush()) {
            diag << "error: cannot write " << *cfg.output << '\n';
            return kIoError;
        }
    } else {
        std::cout << artifact.text << std::flush;
    }
    if (artifact.violated) {
        diag << "error: invariant violated: " << artifact.diagnostic << '\n';
        return kInvariant;
    }
    return kOk;
}

inline int main(int argc, const char* const* argv) {
    try {
        const auto cfg = parse_arguments(argc, argv);
        if (!cfg) return kOk;
        return run(*cfg);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseError;
    }
}

}  // namespace stabexp::cli
