#pragma once

// Theorem-level experiments: forward (known limit A => diagonal decay of
// Psi = W - A Id), converse (diagonal decay => ratio limit), the
// monotonicity witness, and the prime number theorem pipeline.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tauberlab/arith.hpp"
#include "tauberlab/errors.hpp"
#include "tauberlab/operator.hpp"
#include "tauberlab/transform.hpp"

namespace tauberlab {

#ifndef TAUBERLAB_VERSION
#define TAUBERLAB_VERSION "0.1.0"
#endif

inline constexpr const char* kVersion = TAUBERLAB_VERSION;
inline constexpr const char* kReportSchema = "tauberlab/1";

struct Verdict {
    bool value = false;
    double threshold = 0.0;
    double statistic = 0.0;  // the quantity compared against the threshold
};

/// Certified window [u_start, u_end] on which h = g - A stays >= bound.
struct Witness {
    double u_start = 0.0;
    double u_end = 0.0;
    double h_start = 0.0;
    double bound = 0.0;
    int fejer_n = 0;            // basis index whose main lobe sits over the window
    double fejer_mass = 0.0;    // (1/2pi) int_window L sinc^2(uL/2 - pi n) du
};

struct TruncationChecks {
    double asymmetry = 0.0;
    double max_imag = 0.0;
    double min_eigenvalue = 0.0;
};

struct ExperimentReport {
    std::string experiment;
    std::string source;
    double length = 0.0;
    int order = 0;
    double u_max = 0.0;
    std::vector<double> eps_schedule;
    double A = 0.0;
    std::string A_method;
    std::vector<int> n;                  // 0..N
    std::vector<double> psi_diagonal;    // <Psi e_n, e_n> for n above
    double diagonal_eps = 0.0;
    double diagonal_error = 0.0;
    std::vector<double> spectral_tail;   // top |eigenvalues| of Psi
    double spectral_eps = 0.0;
    std::optional<TruncationChecks> checks;
    std::vector<double> ratio_u;
    std::vector<double> ratio_g;
    Verdict diag_decay;
    Verdict ratio_limit;
    bool consistent = false;
    std::optional<Witness> witness;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

struct ExperimentOptions {
    double decay_threshold = 0.02;
    double ratio_threshold = 0.05;
    double spectral_eps = 0.05;
    int spectral_count = 20;
    double witness_threshold = 0.25;
    int jobs = 1;
};

// ---------------------------------------------------------------------------
// Verdict helpers; each is a pure function of stored report arrays.
// ---------------------------------------------------------------------------

/// max over |n| in [N/2, N] of |values[n]|, values indexed by n = 0..N.
inline double band_max(const std::vector<double>& values, int order) {
    double m = 0.0;
    for (int n = (order + 1) / 2; n <= order && n < static_cast<int>(values.size()); ++n)
        m = std::max(m, std::abs(values[n]));
    return m;
}

inline Verdict decay_verdict(const std::vector<double>& psi_diagonal, int order, double threshold) {
    const double stat = band_max(psi_diagonal, order);
    return {stat < threshold, threshold, stat};
}

inline Verdict ratio_verdict(const std::vector<double>& u, const std::vector<double>& g, double a, double u_max,
                             double threshold) {
    double stat = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] >= 0.8 * u_max - 1e-12 && u[i] <= u_max + 1e-12) stat = std::max(stat, std::abs(g[i] - a));
    return {stat < threshold, threshold, stat};
}

/// argmin over a in [lo, hi] of max_{band} |d_n - a| by golden-section search.
inline double minimax_constant(const std::vector<double>& w_diagonal, int order, double lo, double hi) {
    auto cost = [&](double a) {
        double m = 0.0;
        for (int n = (order + 1) / 2; n <= order; ++n) m = std::max(m, std::abs(w_diagonal[n] - a));
        return m;
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = cost(c), fd = cost(d);
    while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = cost(d);
        }
    }
    return 0.5 * (a + b);
}

/// Ratio table on u in [0, u_max]: 40 even steps plus 21 points in [0.8 u_max, u_max].
inline std::vector<double> synthetic_ratio_grid(double u_max) {
    std::vector<double> u;
    for (int k = 0; k <= 40; ++k) u.push_back(u_max * k / 40.0);
    for (int k = 0; k <= 20; ++k) u.push_back(u_max * (0.8 + 0.2 * k / 20.0));
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), u.end());
    return u;
}

/// u = ln x for 40 log-spaced x in [10^3, x_max] plus every decade 10^k <= x_max.
inline std::vector<double> prime_ratio_grid(double x_max) {
    std::vector<double> u;
    const double lo = std::log(1e3), hi = std::log(x_max);
    for (int k = 0; k < 40; ++k) u.push_back(lo + (hi - lo) * k / 39.0);
    for (int k = 3; std::pow(10.0, k) <= x_max * (1 + 1e-12); ++k) u.push_back(k * std::numbers::ln10);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), u.end());
    return u;
}

inline void fill_ratio_table(ExperimentReport& r, const GrowthFunction& s_fn, const std::vector<double>& grid) {
    r.ratio_u = grid;
    r.ratio_g.clear();
    for (double u : grid) r.ratio_g.push_back(normalized_ratio(s_fn, u));
}

// ---------------------------------------------------------------------------
// lower_bound_witness
// ---------------------------------------------------------------------------

/// Scans u in [u_min, u_max] (step 0.01) for h(u) = g(u) - A >= threshold. For
/// non-decreasing S, g(u') >= g(u) e^{-(u'-u)}, so h(u') >= (h + A) e^{-Δ} - A on
/// [u, u + Δ]; Δ = ln((h + A)/(A + threshold/2)) keeps that bound at threshold/2.
/// Within each run of grid points above threshold the maximizer is used; the
/// first run's window is returned.
inline std::optional<Witness> lower_bound_witness(const GrowthFunction& s_fn, double a, double length,
                                                  double threshold, double u_max, double u_min = 0.0) {
    if (!(threshold > 0.0) || !(a >= 0.0)) throw Error(ErrorCode::contract, "lower_bound_witness: need threshold > 0, A >= 0");
    constexpr double kStep = 0.01;
    std::optional<double> best_u;
    double best_h = -std::numeric_limits<double>::infinity();
    for (double u = u_min; u <= u_max + 1e-12; u += kStep) {
        const double h = normalized_ratio(s_fn, u) - a;
        if (h >= threshold) {
            if (h > best_h) {
                best_h = h;
                best_u = u;
            }
        } else if (best_u) {
            break;  // end of the first run
        }
    }
    if (!best_u) return std::nullopt;
    Witness w;
    w.u_start = *best_u;
    w.h_start = best_h;
    w.bound = 0.5 * threshold;
    w.u_end = w.u_start + std::log((best_h + a) / (a + 0.5 * threshold));
    const double mid = 0.5 * (w.u_start + w.u_end);
    w.fejer_n = static_cast<int>(std::lround(mid * length / (2.0 * std::numbers::pi)));
    QuadratureGrid grid;
    grid.add_panel(w.u_start, w.u_end, 32);
    w.fejer_mass = grid.integrate([&](double u) {
        const double s = detail::sinc(0.5 * u * length - std::numbers::pi * w.fejer_n);
        return length * s * s;
    }) / (2.0 * std::numbers::pi);
    return w;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> index_range(int order) {
    std::vector<int> n(order + 1);
    for (int k = 0; k <= order; ++k) n[k] = k;
    return n;
}

inline void spectral_section(ExperimentReport& r, const GrowthFunction& s_fn, const ExperimentOptions& opt) {
    const auto w = assemble_frequency_route(s_fn, IntervalSpec{r.length}, opt.spectral_eps, r.order, {0.0, opt.jobs});
    const auto psi = split_identity(w, r.A);
    auto values = spectrum(psi);
    values.resize(std::min<std::size_t>(values.size(), static_cast<std::size_t>(opt.spectral_count)));
    r.spectral_tail = values;
    r.spectral_eps = opt.spectral_eps;
    r.checks = TruncationChecks{w.asymmetry, w.max_imag, min_eigenvalue(w.entries)};
}

}  // namespace detail

/// S with a known limit A: Psi diagonals at eps = 0 must decay over the band.
inline ExperimentReport forward_experiment(const GrowthFunction& s_fn, std::optional<double> a, double length,
                                           int order, double u_max, const ExperimentOptions& opt = {}) {
    if (!a) throw Error(ErrorCode::contract, "forward_experiment: " + s_fn.label + " has no declared limit A");
    if (order < 1) throw Error(ErrorCode::contract, "forward_experiment: order must be >= 1");
    const double g_end = normalized_ratio(s_fn, u_max);
    if (!(std::abs(g_end - *a) < 0.1))
        throw Error(ErrorCode::contract, "forward_experiment: |g(u_max) - A| = " + std::to_string(std::abs(g_end - *a)) +
                                             " is not below 0.1");
    ExperimentReport r;
    r.experiment = "forward";
    r.source = s_fn.label;
    r.length = length;
    r.order = order;
    r.u_max = u_max;
    r.A = *a;
    r.A_method = "declared";
    r.n = detail::index_range(order);
    r.diagonal_eps = 0.0;
    double err = 0.0;
    r.psi_diagonal = frequency_route_diagonal(s_fn, IntervalSpec{length}, 0.0, 0, order, {0.0, opt.jobs}, &err);
    for (double& v : r.psi_diagonal) v -= *a;
    r.diagonal_error = err;
    detail::spectral_section(r, s_fn, opt);
    fill_ratio_table(r, s_fn, synthetic_ratio_grid(u_max));
    r.diag_decay = decay_verdict(r.psi_diagonal, order, opt.decay_threshold);
    r.ratio_limit = ratio_verdict(r.ratio_u, r.ratio_g, r.A, u_max, opt.ratio_threshold);
    r.consistent = r.diag_decay.value == r.ratio_limit.value;
    return r;
}

/// Diagonal of W for n = 0..N by the route the source allows: the frequency
/// formula at eps = 0 when g is known on all of [0, inf), otherwise the kernel
/// route along the eps schedule, linearly extrapolated to eps = 0 from the two
/// smallest values.
inline std::vector<double> converse_diagonal(const TransformSpec& spec, double length, int order,
                                             const std::vector<double>& schedule, int jobs, std::string& method,
                                             double& used_eps, double& est_error) {
    const auto& s_fn = spec.source;
    if (!std::isfinite(s_fn.range_limit) && s_fn.tail) {
        method = "frequency_formula eps=0";
        used_eps = 0.0;
        return frequency_route_diagonal(s_fn, IntervalSpec{length}, 0.0, 0, order, {0.0, jobs}, &est_error);
    }
    if (!spec.has_closed_form())
        throw Error(ErrorCode::contract, "converse: " + s_fn.label + " needs a closed-form transform or a tail model");
    if (schedule.empty()) throw Error(ErrorCode::contract, "converse: empty eps schedule");
    for (std::size_t k = 1; k < schedule.size(); ++k)
        if (!(schedule[k] < schedule[k - 1]))
            throw Error(ErrorCode::contract, "converse: eps schedule must be strictly decreasing");
    std::vector<std::vector<double>> rows;
    for (double eps : schedule) rows.push_back(kernel_route_diagonal(spec, IntervalSpec{length}, eps, 0, order, jobs));
    est_error = 0.0;
    if (rows.size() == 1) {
        method = "kernel_quadrature eps=" + format_number(schedule.back());
        used_eps = schedule.back();
        return rows.back();
    }
    const double e1 = schedule[schedule.size() - 1], e2 = schedule[schedule.size() - 2];
    const auto& d1 = rows[rows.size() - 1];
    const auto& d2 = rows[rows.size() - 2];
    std::vector<double> out(d1.size());
    for (std::size_t i = 0; i < d1.size(); ++i) {
        out[i] = d1[i] + (d1[i] - d2[i]) * e1 / (e2 - e1);
        est_error = std::max(est_error, std::abs(out[i] - d1[i]));
    }
    method = "kernel_quadrature richardson(" + format_number(e2) + "," + format_number(e1) + ")->0";
    used_eps = 0.0;
    return out;
}

/// Estimates A from the diagonal band, then checks the ratio g against it.
inline ExperimentReport converse_experiment(const TransformSpec& spec, double length, int order,
                                            const std::vector<double>& schedule, double u_max,
                                            const ExperimentOptions& opt = {}) {
    if (order < 1) throw Error(ErrorCode::contract, "converse_experiment: order must be >= 1");
    const auto& s_fn = spec.source;
    if (u_max > s_fn.max_u())
        throw TableExhausted(static_cast<std::uint64_t>(std::ceil(std::exp(u_max))),
                             static_cast<std::uint64_t>(s_fn.range_limit));
    ExperimentReport r;
    r.experiment = "converse";
    r.source = s_fn.label;
    r.length = length;
    r.order = order;
    r.u_max = u_max;
    r.eps_schedule = schedule;
    r.n = detail::index_range(order);
    const auto w_diag =
        converse_diagonal(spec, length, order, schedule, opt.jobs, r.A_method, r.diagonal_eps, r.diagonal_error);
    r.A = minimax_constant(w_diag, order, 0.0, 2.0 * s_fn.growth_constant);
    r.A_method = "minimax band [N/2,N], " + r.A_method;
    r.psi_diagonal = w_diag;
    for (double& v : r.psi_diagonal) v -= r.A;
    fill_ratio_table(r, s_fn, std::isfinite(s_fn.range_limit) ? prime_ratio_grid(std::exp(u_max))
                                                               : synthetic_ratio_grid(u_max));
    r.diag_decay = decay_verdict(r.psi_diagonal, order, opt.decay_threshold);
    r.ratio_limit = ratio_verdict(r.ratio_u, r.ratio_g, r.A, u_max, opt.ratio_threshold);
    r.consistent = r.diag_decay.value == r.ratio_limit.value;
    r.witness = lower_bound_witness(s_fn, r.A, length, opt.witness_threshold, u_max);
    return r;
}

inline const std::vector<double>& default_pnt_schedule() {
    static const std::vector<double> s = {0.008, 0.004, 0.002, 0.001};
    return s;
}

/// Converse experiment for S(x) = pi_P(x) ln x with the closed-form transform;
/// the ratio table comes from the sieve.
inline ExperimentReport pnt_pipeline(const PrimeTable& table, double length = 8.0 * std::numbers::pi,
                                     int order = 128, double u_max = 18.0,
                                     const std::vector<double>& schedule = default_pnt_schedule(),
                                     const ExperimentOptions& opt = {}) {
    const double needed = std::exp(u_max);
    if (needed > static_cast<double>(table.limit()))
        throw TableExhausted(static_cast<std::uint64_t>(std::ceil(needed)), table.limit());
    auto r = converse_experiment(weighted_primes_transform(table), length, order, schedule, u_max, opt);
    r.experiment = "pnt";
    return r;
}

/// A synthetic source with its limit, if it has one.
struct BatteryEntry {
    TransformSpec spec;
    std::optional<double> limit;
    double u_max = 30.0;
    double threshold = 0.0;  // 0 keeps the option defaults
};

inline std::vector<BatteryEntry> default_battery() {
    TransformSpec two_x = sqrt_perturbed_transform(2.0);
    return {
        {identity_transform(), 1.0},
        {std::move(two_x), 2.0},
        {sqrt_perturbed_transform(), 1.0},
        {oscillating_transform(), std::nullopt},
        {single_step_transform(), 0.0},
        {slow_transform(), 1.0, 30.0, 0.1},
    };
}

struct BatteryReport {
    std::vector<ExperimentReport> forward;
    std::vector<ExperimentReport> converse;
    bool all_consistent = false;
};

/// Forward runs for sources with a limit whose decay is not slow, converse runs
/// for all; the slow source uses the relaxed threshold for both verdicts.
inline BatteryReport battery(double length, int order, const ExperimentOptions& opt = {},
                             const std::vector<BatteryEntry>& entries = default_battery()) {
    BatteryReport out;
    out.all_consistent = true;
    for (const auto& e : entries) {
        ExperimentOptions local = opt;
        if (e.threshold > 0.0) local.decay_threshold = local.ratio_threshold = e.threshold;
        if (e.limit && e.threshold == 0.0)
            out.forward.push_back(forward_experiment(e.spec.source, e.limit, length, order, e.u_max, local));
        out.converse.push_back(converse_experiment(e.spec, length, order, {}, e.u_max, local));
        out.all_consistent = out.all_consistent && out.converse.back().consistent;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Verdict& v) {
    return {{"value", v.value}, {"threshold", v.threshold}, {"statistic", v.statistic}};
}

inline nlohmann::ordered_json to_json(const ExperimentReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["version"] = kVersion;
    j["experiment"] = r.experiment;
    j["source"] = r.source;
    j["length"] = r.length;
    j["order"] = r.order;
    j["u_max"] = r.u_max;
    j["eps_schedule"] = r.eps_schedule;
    j["A"] = r.A;
    j["A_method"] = r.A_method;
    j["n"] = r.n;
    j["psi_diagonal"] = r.psi_diagonal;
    j["diagonal_eps"] = r.diagonal_eps;
    j["diagonal_error"] = r.diagonal_error;
    j["spectral_tail"] = r.spectral_tail;
    j["spectral_eps"] = r.spectral_eps;
    if (r.checks)
        j["truncation_checks"] = {{"asymmetry", r.checks->asymmetry},
                                  {"max_imag", r.checks->max_imag},
                                  {"min_eigenvalue", r.checks->min_eigenvalue}};
    j["ratio_table"] = {{"u", r.ratio_u}, {"g", r.ratio_g}};
    j["verdicts"] = {{"diag_decay", to_json(r.diag_decay)},
                     {"ratio_limit", to_json(r.ratio_limit)},
                     {"consistent", r.consistent}};
    if (r.witness)
        j["witness"] = {{"u_start", r.witness->u_start}, {"u_end", r.witness->u_end},
                        {"h_start", r.witness->h_start}, {"bound", r.witness->bound},
                        {"fejer_n", r.witness->fejer_n}, {"fejer_mass", r.witness->fejer_mass}};
    else
        j["witness"] = nullptr;
    j["config"] = r.config;
    return j;
}

inline nlohmann::ordered_json to_json(const BatteryReport& b) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["version"] = kVersion;
    j["experiment"] = "battery";
    j["forward"] = nlohmann::ordered_json::array();
    for (const auto& r : b.forward) j["forward"].push_back(to_json(r));
    j["converse"] = nlohmann::ordered_json::array();
    for (const auto& r : b.converse) j["converse"].push_back(to_json(r));
    j["all_consistent"] = b.all_consistent;
    return j;
}

inline void write_ratio_csv(std::ostream& out, const ExperimentReport& r) {
    out << "# tauberlab-ratio v1, source=" << r.source << ", A=" << format_number(r.A) << "\n";
    out << "u,g\n";
    for (std::size_t i = 0; i < r.ratio_u.size(); ++i)
        out << format_number(r.ratio_u[i]) << ',' << format_number(r.ratio_g[i]) << '\n';
}

/// Writes `content` to a sibling temp file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::resource, "cannot write " + tmp);
        out << content;
        if (!out) throw Error(ErrorCode::resource, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::resource, "cannot install " + path.string() + ": " + ec.message());
}

}  // namespace tauberlab
