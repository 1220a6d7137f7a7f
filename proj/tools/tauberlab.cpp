#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tauberlab/tauberlab.hpp"

using namespace tauberlab;
using json = nlohmann::ordered_json;

namespace {

constexpr int kUsageExit = 64;

struct Globals {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> prime_limit;
    std::optional<std::string> cache_dir;
    std::optional<int> jobs;
    std::optional<std::string> format;
};

RunConfig effective_config(const Globals& g) {
    RunConfig cfg = load_config(g.config_path ? std::optional<std::filesystem::path>(*g.config_path) : std::nullopt);
    if (g.prime_limit) cfg.prime_limit = *g.prime_limit;
    if (g.cache_dir) cfg.cache_dir = *g.cache_dir;
    if (g.jobs) cfg.jobs = *g.jobs;
    if (g.format) cfg.format = *g.format == "csv" ? OutputFormat::csv : OutputFormat::json;
    cfg.validate();
    return cfg;
}

json complex_json(const Evaluation& e) {
    return {{"re", e.value.real()}, {"im", e.value.imag()}, {"est_error", e.est_error}};
}

void emit(const std::string& text, const std::optional<std::string>& path) {
    if (path) write_file_atomic(*path, text);
    else std::cout << text;
}

/// Named sources for operator and experiment commands.
struct Source {
    TransformSpec spec;
    std::optional<double> limit;
};

Source make_source(const std::string& name, const PrimeTable* table, const std::optional<std::string>& file) {
    if (name == "x") return {identity_transform(), 1.0};
    if (name == "integers") return {integers_transform(), 1.0};
    if (name == "sqrt") return {sqrt_perturbed_transform(), 1.0};
    if (name == "2x+sqrt") return {sqrt_perturbed_transform(2.0), 2.0};
    if (name == "osc") return {oscillating_transform(), std::nullopt};
    if (name == "step") return {single_step_transform(), 0.0};
    if (name == "slow") return {slow_transform(), 1.0};
    if (name == "zero") return {zero_transform(), 0.0};
    if (name == "psi") return {psi_transform(), 0.0};
    if (name == "primes" || name == "wprimes") {
        if (!table) throw Error(ErrorCode::contract, "source " + name + " needs a prime table");
        if (name == "primes") return {primes_transform(*table), std::nullopt};
        return {weighted_primes_transform(*table), 1.0};
    }
    if (name == "file") {
        if (!file) throw Error(ErrorCode::contract, "source file needs --file");
        std::ifstream in(*file);
        if (!in) throw Error(ErrorCode::resource, "cannot open " + *file);
        return {step_transform(read_step_function_csv(in), "file:" + *file), 0.0};
    }
    throw Error(ErrorCode::contract, "unknown source '" + name + "'");
}

const std::vector<std::string> kSourceNames = {"x",    "integers", "sqrt",   "2x+sqrt", "osc",  "step",
                                               "slow", "zero",     "psi",    "primes",  "wprimes", "file"};

PrimeTable load_table(const RunConfig& cfg, std::uint64_t limit) {
    return build_prime_table(std::max<std::uint64_t>(limit, 2), cfg.cache_dir);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0) throw Error(ErrorCode::parse, "malformed number list '" + text + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tauberlab: Tauberian operator experiments for counting functions"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "Flat key = value configuration file");
    app.add_option("--prime-limit", g.prime_limit, "Prime table limit");
    app.add_option("--cache-dir", g.cache_dir, "Prime cache directory (default $TAUBERLAB_CACHE_DIR)");
    app.add_option("--jobs", g.jobs, "Worker thread cap")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    // primes
    auto* primes = app.add_subcommand("primes", "Prime counting from the sieve");
    double count_x = 0.0;
    primes->add_option("--count", count_x, "Print pi_P(x)")->required();

    // special eval
    auto* special = app.add_subcommand("special", "Zeta-family evaluations");
    special->require_subcommand(1);
    auto* special_eval = special->add_subcommand("eval", "Evaluate one function at s = sigma + i t");
    std::string fn;
    double sigma = 2.0, t = 0.0;
    special_eval->add_option("--fn", fn, "Function")
        ->required()
        ->check(CLI::IsMember({"zeta", "zetad", "pzeta", "pzetad", "psi", "psip"}));
    special_eval->add_option("--sigma", sigma, "Real part (> 1)")->required();
    special_eval->add_option("--t", t, "Imaginary part");

    // transform eval
    auto* transform = app.add_subcommand("transform", "Laplace transforms of counting functions");
    transform->require_subcommand(1);
    auto* transform_eval = transform->add_subcommand("eval", "Evaluate G(s)");
    std::string t_source;
    std::optional<std::string> t_file, t_oracle;
    double t_sigma = 2.0, t_t = 0.0, t_umax = 18.0;
    int t_panels = 400;
    transform_eval->add_option("--source", t_source, "Source")
        ->required()
        ->check(CLI::IsMember({"integers", "primes", "wprimes", "file"}));
    transform_eval->add_option("--file", t_file, "Step function CSV (x_j, a_j per line)");
    transform_eval->add_option("--sigma", t_sigma, "Real part (> 1)")->required();
    transform_eval->add_option("--t", t_t, "Imaginary part");
    transform_eval->add_option("--oracle", t_oracle, "Use the quadrature oracle")->check(CLI::IsMember({"quadrature"}));
    transform_eval->add_option("--umax", t_umax, "Quadrature cutoff U");
    transform_eval->add_option("--panels", t_panels, "Quadrature panels")->check(CLI::PositiveNumber);

    // operator
    auto* op = app.add_subcommand("operator", "Matrix truncations of W and Psi");
    op->require_subcommand(1);
    std::string o_source = "integers", o_route = "frequency";
    std::optional<std::string> o_file, o_out;
    std::optional<double> o_length, o_umax;
    std::optional<int> o_order;
    double o_eps = 0.1, o_a = 0.0;
    auto add_operator_flags = [&](CLI::App* sub) {
        sub->add_option("--source", o_source, "Source")->check(CLI::IsMember(kSourceNames));
        sub->add_option("--file", o_file, "Step function CSV for --source file");
        sub->add_option("--length", o_length, "Interval length L");
        sub->add_option("--eps", o_eps, "Damping eps (>= 0; kernel route needs >= 1e-3)");
        sub->add_option("--order", o_order, "Truncation order N (indices -N..N)");
        sub->add_option("--route", o_route, "Assembly route")->check(CLI::IsMember({"kernel", "frequency"}));
        sub->add_option("--A", o_a, "Subtract A Id (Psi = W - A Id)");
        sub->add_option("--umax", o_umax, "Frequency cutoff U (default automatic)");
        sub->add_option("--out", o_out, "Write to file instead of stdout");
    };
    auto* op_assemble = op->add_subcommand("assemble", "Write the matrix as CSV");
    auto* op_diag = op->add_subcommand("diag", "Diagonal <Psi e_n, e_n> for n = 0..N");
    auto* op_spectrum = op->add_subcommand("spectrum", "Eigenvalues by decreasing modulus");
    for (auto* sub : {op_assemble, op_diag, op_spectrum}) add_operator_flags(sub);

    // experiment
    auto* exp = app.add_subcommand("experiment", "Tauberian experiments");
    exp->require_subcommand(1);
    std::optional<double> e_length, e_umax, e_a;
    std::optional<int> e_order;
    std::optional<std::string> e_report, e_ratio_csv, e_schedule, e_file;
    std::string e_source = "sqrt";
    auto add_experiment_flags = [&](CLI::App* sub, bool with_source) {
        sub->add_option("--length", e_length, "Interval length L");
        sub->add_option("--order", e_order, "Truncation order N");
        sub->add_option("--umax", e_umax, "Largest u for ratio tables");
        sub->add_option("--report", e_report, "Write the JSON report here (atomic)");
        sub->add_option("--ratio-csv", e_ratio_csv, "Write the ratio table CSV here");
        sub->add_option("--eps-schedule", e_schedule, "Comma-separated decreasing eps values");
        if (with_source) {
            sub->add_option("--source", e_source, "Source")->check(CLI::IsMember(kSourceNames));
            sub->add_option("--file", e_file, "Step function CSV for --source file");
            sub->add_option("--A", e_a, "Declared limit A (forward)");
        }
    };
    auto* exp_forward = exp->add_subcommand("forward", "Known limit => diagonal decay");
    auto* exp_converse = exp->add_subcommand("converse", "Diagonal decay => ratio limit");
    auto* exp_pnt = exp->add_subcommand("pnt", "Prime number theorem pipeline");
    auto* exp_battery = exp->add_subcommand("battery", "Synthetic battery");
    add_experiment_flags(exp_forward, true);
    add_experiment_flags(exp_converse, true);
    add_experiment_flags(exp_pnt, false);
    add_experiment_flags(exp_battery, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help() << json{{"code", "usage"}, {"message", e.what()}}.dump() << "\n";
        return kUsageExit;
    }

    try {
        const RunConfig cfg = effective_config(g);
        const EvalTolerance tol = cfg.tolerance;

        if (primes->parsed()) {
            if (!std::isfinite(count_x) || count_x < 0.0) throw Error(ErrorCode::domain, "--count must be >= 0");
            if (count_x > static_cast<double>(cfg.prime_limit))
                throw TableExhausted(static_cast<std::uint64_t>(std::floor(count_x)), cfg.prime_limit);
            const auto table = load_table(cfg, cfg.prime_limit);
            std::cout << count_primes(count_x, table) << "\n";
            return 0;
        }

        if (special_eval->parsed()) {
            const Complex s(sigma, t);
            Evaluation e;
            if (fn == "zeta") e = zeta(s, tol);
            else if (fn == "zetad") e = zeta_deriv(s, tol);
            else if (fn == "pzeta") e = prime_zeta(s, tol);
            else if (fn == "pzetad") e = prime_zeta_deriv(s, tol);
            else if (fn == "psi") e = psi_entire(s, tol);
            else e = psi_prime_part(s, tol);
            std::cout << complex_json(e).dump() << "\n";
            return 0;
        }

        if (transform_eval->parsed()) {
            const Complex s(t_sigma, t_t);
            std::optional<PrimeTable> table;
            if (t_source == "primes" || t_source == "wprimes") {
                const std::uint64_t need =
                    t_oracle ? static_cast<std::uint64_t>(std::ceil(std::exp(t_umax))) : std::uint64_t{2};
                if (need > cfg.prime_limit) throw TableExhausted(need, cfg.prime_limit);
                // The closed forms never consult the table.
                table = t_oracle ? load_table(cfg, cfg.prime_limit) : PrimeTable::sieve(2);
            }
            const Source src = make_source(t_source, table ? &*table : nullptr, t_file);
            Evaluation e;
            std::string kind;
            if (t_oracle) {
                e = transform_quadrature(src.spec.source, s, t_umax, t_panels);
                kind = to_string(TransformKind::numeric_quadrature);
            } else {
                e = src.spec(s);
                kind = to_string(src.spec.kind);
            }
            json out = complex_json(e);
            out["kind"] = kind;
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (op->parsed()) {
            const double length = o_length.value_or(cfg.length);
            const int order = o_order.value_or(cfg.order);
            std::optional<PrimeTable> table;
            if (o_source == "primes" || o_source == "wprimes") table = load_table(cfg, cfg.prime_limit);
            const Source src = make_source(o_source, table ? &*table : nullptr, o_file);
            const IntervalSpec interval{length};
            const bool kernel_route = o_route == "kernel";
            const FrequencyOptions fopt{o_umax.value_or(0.0), cfg.jobs};

            if (op_diag->parsed()) {
                const auto d = kernel_route ? kernel_route_diagonal(src.spec, interval, o_eps, 0, order, cfg.jobs)
                                            : frequency_route_diagonal(src.spec.source, interval, o_eps, 0, order, fopt);
                std::ostringstream text;
                if (cfg.format == OutputFormat::csv) {
                    text << "n,value\n";
                    for (int n = 0; n <= order; ++n) text << n << ',' << format_number(d[n] - o_a) << '\n';
                } else {
                    std::vector<double> psi(d);
                    for (double& v : psi) v -= o_a;
                    json j{{"schema", kReportSchema}, {"version", kVersion}, {"source", src.spec.source.label},
                           {"route", kernel_route ? "kernel_quadrature" : "frequency_formula"},
                           {"length", length}, {"eps", o_eps}, {"A", o_a}, {"diagonal", psi},
                           {"config", cfg.to_json()}};
                    text << j.dump(2) << "\n";
                }
                emit(text.str(), o_out);
                return 0;
            }
            auto w = kernel_route ? assemble_kernel_route(src.spec, interval, o_eps, order, cfg.jobs)
                                  : assemble_frequency_route(src.spec.source, interval, o_eps, order, fopt);
            const auto m = split_identity(w, o_a);
            std::ostringstream text;
            if (op_assemble->parsed()) {
                write_matrix_csv(text, m);
            } else {
                const auto values = spectrum(m);
                if (cfg.format == OutputFormat::csv) {
                    text << "k,eigenvalue\n";
                    for (std::size_t k = 0; k < values.size(); ++k) text << k << ',' << format_number(values[k]) << '\n';
                } else {
                    json j{{"schema", kReportSchema}, {"version", kVersion}, {"source", m.source},
                           {"route", to_string(m.route)}, {"length", length}, {"eps", o_eps}, {"A", o_a},
                           {"eigenvalues", values}, {"config", cfg.to_json()}};
                    text << j.dump(2) << "\n";
                }
            }
            emit(text.str(), o_out);
            return 0;
        }

        if (exp->parsed()) {
            const double length = e_length.value_or(cfg.length);
            ExperimentOptions opt;
            opt.decay_threshold = cfg.decay_threshold;
            opt.ratio_threshold = cfg.ratio_threshold;
            opt.jobs = cfg.jobs;
            json config = cfg.to_json();
            auto finish = [&](ExperimentReport r) {
                r.config = config;
                if (e_ratio_csv) {
                    std::ostringstream csv;
                    write_ratio_csv(csv, r);
                    write_file_atomic(*e_ratio_csv, csv.str());
                }
                emit(to_json(r).dump(2) + "\n", e_report);
            };

            if (exp_pnt->parsed()) {
                const double u_max = e_umax.value_or(18.0);
                const double need = std::exp(u_max);
                if (need > static_cast<double>(cfg.prime_limit))
                    throw TableExhausted(static_cast<std::uint64_t>(std::ceil(need)), cfg.prime_limit);
                const auto table = load_table(cfg, cfg.prime_limit);
                const auto schedule = e_schedule ? parse_list(*e_schedule) : default_pnt_schedule();
                finish(pnt_pipeline(table, length, e_order.value_or(128), u_max, schedule, opt));
                return 0;
            }
            if (exp_battery->parsed()) {
                auto b = battery(length, e_order.value_or(cfg.order), opt);
                for (auto* list : {&b.forward, &b.converse})
                    for (auto& r : *list) r.config = config;
                json j = to_json(b);
                j["config"] = config;
                emit(j.dump(2) + "\n", e_report);
                return 0;
            }
            std::optional<PrimeTable> table;
            if (e_source == "primes" || e_source == "wprimes") table = load_table(cfg, cfg.prime_limit);
            const Source src = make_source(e_source, table ? &*table : nullptr, e_file);
            const int order = e_order.value_or(cfg.order);
            const double u_max = e_umax.value_or(std::isfinite(src.spec.source.range_limit) ? 18.0 : 30.0);
            if (exp_forward->parsed()) {
                finish(forward_experiment(src.spec.source, e_a ? e_a : src.limit, length, order, u_max, opt));
            } else {
                const auto schedule = e_schedule ? parse_list(*e_schedule) : default_pnt_schedule();
                finish(converse_experiment(src.spec, length, order, schedule, u_max, opt));
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << json{{"code", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << json{{"code", "resource"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }
    std::cerr << app.help();
    return kUsageExit;
}
