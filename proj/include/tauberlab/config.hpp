#pragma once

// Run configuration: defaults, overlaid by a flat `key = value` file, overlaid
// by command-line flags.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <string>

#include "tauberlab/arith.hpp"
#include "tauberlab/errors.hpp"
#include "tauberlab/special.hpp"

namespace tauberlab {

enum class OutputFormat { json, csv };

struct RunConfig {
    std::filesystem::path cache_dir = default_cache_dir();
    std::uint64_t prime_limit = 100'000'000;
    double length = 8.0 * std::numbers::pi;
    int order = 64;
    EvalTolerance tolerance;
    OutputFormat format = OutputFormat::json;
    int jobs = 1;
    double decay_threshold = 0.02;
    double ratio_threshold = 0.05;

    void validate() const {
        PrimeTable::check_limit(prime_limit);
        if (!std::isfinite(length) || !(length > 0.0)) throw Error(ErrorCode::contract, "config: length must be > 0");
        if (order < 1 || order > 256) throw Error(ErrorCode::contract, "config: order must lie in [1, 256]");
        if (jobs < 1) throw Error(ErrorCode::contract, "config: jobs must be >= 1");
        if (!(decay_threshold > 0.0)) throw Error(ErrorCode::contract, "config: decay_threshold must be > 0");
        if (!(ratio_threshold > 0.0)) throw Error(ErrorCode::contract, "config: ratio_threshold must be > 0");
        tolerance.validate();
    }

    nlohmann::ordered_json to_json() const {
        return {{"cache_dir", cache_dir.string()},
                {"prime_limit", prime_limit},
                {"length", length},
                {"order", order},
                {"abs_tol", tolerance.abs_tol},
                {"max_terms", tolerance.max_terms},
                {"format", format == OutputFormat::json ? "json" : "csv"},
                {"jobs", jobs},
                {"decay_threshold", decay_threshold},
                {"ratio_threshold", ratio_threshold}};
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& text, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty())
        throw Error(ErrorCode::parse, "config line " + std::to_string(line) + ": '" + key + "' expects a number");
    return v;
}

inline long long parse_integer(const std::string& key, const std::string& text, int line) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty())
        throw Error(ErrorCode::parse, "config line " + std::to_string(line) + ": '" + key + "' expects an integer");
    return v;
}

inline void require_positive(const std::string& key, double v, int line) {
    if (!(v > 0.0))
        throw Error(ErrorCode::contract, "config line " + std::to_string(line) + ": '" + key + "' must be positive");
}

}  // namespace detail

/// Applies `key = value` lines to `cfg`. Unknown keys and malformed lines are errors.
inline void apply_config(RunConfig& cfg, std::istream& in) {
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::parse, "config line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorCode::parse, "config line " + std::to_string(line) + ": expected 'key = value'");
        if (key == "cache_dir") {
            cfg.cache_dir = value;
        } else if (key == "prime_limit") {
            const auto v = detail::parse_integer(key, value, line);
            detail::require_positive(key, static_cast<double>(v), line);
            cfg.prime_limit = static_cast<std::uint64_t>(v);
        } else if (key == "length") {
            cfg.length = detail::parse_real(key, value, line);
            detail::require_positive(key, cfg.length, line);
        } else if (key == "order") {
            const auto v = detail::parse_integer(key, value, line);
            detail::require_positive(key, static_cast<double>(v), line);
            cfg.order = static_cast<int>(v);
        } else if (key == "abs_tol") {
            cfg.tolerance.abs_tol = detail::parse_real(key, value, line);
            detail::require_positive(key, cfg.tolerance.abs_tol, line);
        } else if (key == "max_terms") {
            const auto v = detail::parse_integer(key, value, line);
            detail::require_positive(key, static_cast<double>(v), line);
            cfg.tolerance.max_terms = static_cast<std::size_t>(v);
        } else if (key == "format") {
            if (value == "json") cfg.format = OutputFormat::json;
            else if (value == "csv") cfg.format = OutputFormat::csv;
            else throw Error(ErrorCode::parse, "config line " + std::to_string(line) + ": format must be json or csv");
        } else if (key == "jobs") {
            const auto v = detail::parse_integer(key, value, line);
            detail::require_positive(key, static_cast<double>(v), line);
            cfg.jobs = static_cast<int>(v);
        } else if (key == "decay_threshold") {
            cfg.decay_threshold = detail::parse_real(key, value, line);
            detail::require_positive(key, cfg.decay_threshold, line);
        } else if (key == "ratio_threshold") {
            cfg.ratio_threshold = detail::parse_real(key, value, line);
            detail::require_positive(key, cfg.ratio_threshold, line);
        } else {
            throw Error(ErrorCode::parse, "config line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
}

/// Defaults, overlaid by the file at `path` when given.
inline RunConfig load_config(const std::optional<std::filesystem::path>& path) {
    RunConfig cfg;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw Error(ErrorCode::resource, "cannot open config file " + path->string());
        apply_config(cfg, in);
    }
    cfg.validate();
    return cfg;
}

}  // namespace tauberlab
