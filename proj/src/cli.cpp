#include "pgarch/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgarch/io.hpp"
#include "pgarch/rng.hpp"
#include "pgarch/likelihood.hpp"
#include "pgarch/mc_harness.hpp"
#include "pgarch/model.hpp"
#include "pgarch/qmle.hpp"
#include "pgarch/simulation.hpp"
#include "pgarch/stationarity.hpp"

namespace pgarch::cli {

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

json section(const json& config, const char* name) {
    return config.contains(name) ? config.at(name) : json::object();
}

/// Config value fills in only when the flag was not given; flags win.
template <typename T>
void config_fill(const json& sec, const char* key, const CLI::Option* opt, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (sec.contains(key)) {
        try {
            target = sec.at(key).get<T>();
        } catch (const json::exception& e) {
            throw DataError(std::string("config key '") + key + "': " + e.what());
        }
    }
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::string field;
    std::istringstream ss(text);
    while (std::getline(ss, field, ',')) {
        try {
            size_t consumed = 0;
            values.push_back(std::stod(field, &consumed));
            if (consumed != field.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(flag) + ": cannot parse '" + field +
                                        "' as a number");
        }
    }
    return values;
}

std::vector<long long> parse_int_list(const std::string& text, const char* flag) {
    std::vector<long long> values;
    for (double v : parse_double_list(text, flag)) values.push_back(static_cast<long long>(v));
    return values;
}

/// Shared model flags: period, orders and the season-major parameter lists.
struct ModelArgs {
    int period = 1;
    int order_q = 0;
    int order_p = 0;
    std::string omega_text, alpha_text, beta_text;
    std::vector<double> omega, alpha_flat, beta_flat;
    CLI::Option *opt_period = nullptr, *opt_q = nullptr, *opt_p = nullptr;
    CLI::Option *opt_omega = nullptr, *opt_alpha = nullptr, *opt_beta = nullptr;

    void add_to(CLI::App* cmd, bool with_values) {
        opt_period = cmd->add_option("-S,--period", period, "period S (>= 1)");
        opt_q = cmd->add_option("-q,--order-q", order_q, "squared-lag order q");
        opt_p = cmd->add_option("-p,--order-p", order_p, "variance-lag order p");
        if (with_values) {
            opt_omega = cmd->add_option("--omega", omega_text,
                                        "comma-separated seasonal intercepts, length S");
            opt_alpha = cmd->add_option(
                "--alpha", alpha_text,
                "comma-separated alpha coefficients, season-major, length S*q");
            opt_beta = cmd->add_option(
                "--beta", beta_text, "comma-separated beta coefficients, season-major, length S*p");
        }
    }

    void fill_from_config(const json& model) {
        config_fill(model, "period", opt_period, period);
        config_fill(model, "order_q", opt_q, order_q);
        config_fill(model, "order_p", opt_p, order_p);
        config_fill(model, "omega", opt_omega, omega);
        config_fill(model, "alpha", opt_alpha, alpha_flat);
        config_fill(model, "beta", opt_beta, beta_flat);
        if (opt_omega != nullptr && opt_omega->count() > 0)
            omega = parse_double_list(omega_text, "--omega");
        if (opt_alpha != nullptr && opt_alpha->count() > 0)
            alpha_flat = parse_double_list(alpha_text, "--alpha");
        if (opt_beta != nullptr && opt_beta->count() > 0)
            beta_flat = parse_double_list(beta_text, "--beta");
    }

    PGarchSpec build_spec() const {
        if (period < 1) throw std::invalid_argument("--period: must be >= 1");
        if (order_q < 0 || order_p < 0)
            throw std::invalid_argument("--order-q/--order-p: must be >= 0");
        if (static_cast<int>(omega.size()) != period)
            throw std::invalid_argument("--omega: expected " + std::to_string(period) +
                                        " values, got " + std::to_string(omega.size()));
        if (static_cast<int>(alpha_flat.size()) != period * order_q)
            throw std::invalid_argument("--alpha: expected " + std::to_string(period * order_q) +
                                        " values, got " + std::to_string(alpha_flat.size()));
        if (static_cast<int>(beta_flat.size()) != period * order_p)
            throw std::invalid_argument("--beta: expected " + std::to_string(period * order_p) +
                                        " values, got " + std::to_string(beta_flat.size()));
        PGarchSpec spec;
        spec.period = period;
        spec.order_q = order_q;
        spec.order_p = order_p;
        spec.omega = omega;
        spec.alpha.resize(period);
        spec.beta.resize(period);
        for (int v = 0; v < period; ++v) {
            spec.alpha[v].assign(alpha_flat.begin() + static_cast<long>(v) * order_q,
                                 alpha_flat.begin() + static_cast<long>(v + 1) * order_q);
            spec.beta[v].assign(beta_flat.begin() + static_cast<long>(v) * order_p,
                                beta_flat.begin() + static_cast<long>(v + 1) * order_p);
        }
        const auto violations = validate_spec(spec);
        if (!violations.empty()) {
            std::string msg = "--omega/--alpha/--beta:";
            for (const auto& v : violations) msg += " " + v + ";";
            throw std::invalid_argument(msg);
        }
        return spec;
    }
};

struct DistArgs {
    std::string name = "gaussian";
    double dof = 6.0;
    CLI::Option *opt_name = nullptr, *opt_dof = nullptr;

    void add_to(CLI::App* cmd) {
        opt_name = cmd->add_option("--dist", name, "innovation law: gaussian, student-t, unit")
                       ->check(CLI::IsMember({"gaussian", "student-t", "unit"}));
        opt_dof = cmd->add_option("--dof", dof, "student-t degrees of freedom (> 2)");
    }

    void fill_from_config(const json& sec) {
        config_fill(sec, "dist", opt_name, name);
        config_fill(sec, "dof", opt_dof, dof);
    }

    InnovationDist build() const {
        if (name == "gaussian") return InnovationDist::gaussian();
        if (name == "unit") return InnovationDist::unit_constant();
        if (!(dof > 2.0)) throw std::invalid_argument("--dof: must be > 2");
        return InnovationDist::student_t(dof);
    }
};

struct FitArgs {
    std::string init = "sample";
    int n_starts = 5;
    int max_iters = 200;
    double grad_tol = 1e-7;
    bool no_beta_radius = false;
    double margin = 1e-3;
    CLI::Option *opt_init = nullptr, *opt_starts = nullptr, *opt_iters = nullptr;
    CLI::Option *opt_tol = nullptr, *opt_radius = nullptr, *opt_margin = nullptr;

    void add_to(CLI::App* cmd) {
        opt_init = cmd->add_option("--init", init, "presample rule: omega (3.5a-style) or sample")
                       ->check(CLI::IsMember({"omega", "sample"}));
        opt_starts = cmd->add_option("--starts", n_starts, "number of optimizer starts");
        opt_iters = cmd->add_option("--max-iters", max_iters, "iteration cap per start");
        opt_tol = cmd->add_option("--grad-tol", grad_tol, "projected-gradient tolerance");
        opt_radius = cmd->add_flag("--no-beta-radius", no_beta_radius,
                                   "do not reject iterates with rho(prod beta) >= 1 - margin");
        opt_margin = cmd->add_option("--margin", margin, "beta spectral-radius margin");
    }

    void fill_from_config(const json& sec) {
        config_fill(sec, "init", opt_init, init);
        config_fill(sec, "n_starts", opt_starts, n_starts);
        config_fill(sec, "max_iters", opt_iters, max_iters);
        config_fill(sec, "grad_tol", opt_tol, grad_tol);
        config_fill(sec, "margin", opt_margin, margin);
    }

    FitOptions build(std::uint64_t seed) const {
        FitOptions opts;
        opts.init = init == "omega" ? InitScheme::OmegaInit : InitScheme::SampleInit;
        opts.n_starts = n_starts;
        opts.max_iters = max_iters;
        opts.grad_tol = grad_tol;
        opts.enforce_beta_radius = !no_beta_radius;
        opts.margin = margin;
        opts.seed = seed;
        return opts;
    }
};

void require_out(const std::string& out) {
    if (out.empty()) throw std::invalid_argument("--out: an output path is required");
}

json stationarity_report(const PGarchSpec& spec, const InnovationDist& dist, long long blocks,
                         double z, int n0_max, long long mc_size, bool run_delta,
                         std::uint64_t seed) {
    json j;
    const LyapunovEstimate est = lyapunov_mc(spec, dist, blocks, seed, z);
    j["lyapunov"] = io::lyapunov_to_json(est);
    if (spec.order_p >= 1)
        j["beta_spectral_radius"] = beta_spectral_radius(spec);
    else
        j["beta_spectral_radius"] = nullptr;
    if (run_delta) {
        const auto dm = moment_delta_search(spec, dist, n0_max, mc_size, mix_seed(seed, 0xde17a));
        if (dm)
            j["delta_search"] = {{"found", true},
                                 {"delta", dm->delta},
                                 {"n0", dm->n0},
                                 {"upper_bound", dm->upper_bound}};
        else
            j["delta_search"] = {{"found", false}};
    } else {
        j["delta_search"] = nullptr;
    }
    return j;
}

int run(std::vector<std::string> args) {
    CLI::App app{"periodic GARCH toolkit: simulation, stationarity analysis, QML fitting "
                 "and Monte Carlo verification"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config; flags override config keys")
        ->expected(1);

    // ---- simulate ----
    // every subcommand lets --config fall through to the top-level option
    auto* sim = app.add_subcommand("simulate", "simulate a path and write t,season,y,h CSV");
    sim->fallthrough();
    ModelArgs sim_model;
    DistArgs sim_dist;
    long long sim_years = 100, sim_burn = -1;
    sim_model.add_to(sim, true);
    sim_dist.add_to(sim);
    auto* opt_years = sim->add_option("--years", sim_years, "path length in periods (T = years*S)");
    auto* opt_burn = sim->add_option("--burn-in", sim_burn,
                                     "burn-in observations, multiple of S (default 50*S)");
    auto* sim_seed = sim->add_option("--seed", seed, "root seed for all randomness");
    auto* sim_out = sim->add_option("--out", out_path, "output CSV path");

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "fit by QML and write a JSON report");
    fit_cmd->fallthrough();
    ModelArgs fit_model;
    FitArgs fit_args;
    std::string data_path, column = "y";
    int offset = 0;
    fit_model.add_to(fit_cmd, false);
    fit_args.add_to(fit_cmd);
    auto* opt_data = fit_cmd->add_option("--data", data_path, "input CSV path");
    auto* opt_col = fit_cmd->add_option("--column", column, "value column name");
    auto* opt_off = fit_cmd->add_option("--offset", offset,
                                        "season of the file's first row minus 1 (shifts alignment)");
    auto* fit_seed = fit_cmd->add_option("--seed", seed, "root seed for multi-start dispersion");
    auto* fit_out = fit_cmd->add_option("--out", out_path, "output JSON path");

    // ---- lyapunov / stationarity ----
    auto* lya = app.add_subcommand("lyapunov",
                                   "estimate gamma^S, beta spectral radius and a fractional "
                                   "moment order; write JSON");
    auto* sta = app.add_subcommand("stationarity", "print a stationarity decision summary");
    lya->fallthrough();
    sta->fallthrough();
    ModelArgs lya_model, sta_model;
    DistArgs lya_dist, sta_dist;
    long long blocks = 10000, mc_size = 20000;
    double z = 2.58;
    int n0_max = 20;
    bool skip_delta = false;
    lya_model.add_to(lya, true);
    lya_dist.add_to(lya);
    auto* opt_blocks = lya->add_option("--blocks", blocks, "number of S-block products");
    auto* opt_z = lya->add_option("--z", z, "confidence multiplier for the decision");
    auto* opt_n0 = lya->add_option("--n0-max", n0_max, "largest n0 in the delta search");
    auto* opt_mc = lya->add_option("--mc-size", mc_size, "Monte Carlo size per delta-search cell");
    lya->add_flag("--skip-delta", skip_delta, "skip the fractional-moment search");
    auto* lya_seed = lya->add_option("--seed", seed, "root seed");
    auto* lya_out = lya->add_option("--out", out_path, "output JSON path");
    sta_model.add_to(sta, true);
    sta_dist.add_to(sta);
    auto* sta_blocks = sta->add_option("--blocks", blocks, "number of S-block products");
    auto* sta_z = sta->add_option("--z", z, "confidence multiplier for the decision");
    auto* sta_n0 = sta->add_option("--n0-max", n0_max, "largest n0 in the delta search");
    auto* sta_mc = sta->add_option("--mc-size", mc_size, "Monte Carlo size per delta-search cell");
    sta->add_flag("--skip-delta", skip_delta, "skip the fractional-moment search");
    auto* sta_seed = sta->add_option("--seed", seed, "root seed");
    auto* sta_out = sta->add_option("--out", out_path, "optional JSON output path");

    // ---- montecarlo ----
    auto* mc = app.add_subcommand("montecarlo",
                                  "replicated simulate-then-fit experiment; write JSON report");
    mc->fallthrough();
    ModelArgs mc_model;
    DistArgs mc_dist;
    FitArgs mc_fit;
    std::string task = "consistency", n_grid_text = "250,1000,4000";
    long long mc_years = 4000, j_years = 2000;
    int mc_reps = 200;
    mc_model.add_to(mc, true);
    mc_dist.add_to(mc);
    mc_fit.add_to(mc);
    auto* opt_task = mc->add_option("--task", task, "consistency or normality")
                         ->check(CLI::IsMember({"consistency", "normality"}));
    auto* opt_grid = mc->add_option("--n-grid", n_grid_text,
                                    "comma-separated N values (consistency task)");
    auto* opt_n = mc->add_option("--years", mc_years, "N for the normality task");
    auto* opt_r = mc->add_option("--replications", mc_reps, "replications per cell");
    auto* opt_jy = mc->add_option("--j-years", j_years,
                                  "path length for the cross-block J diagnostic (0 disables)");
    auto* opt_threads = mc->add_option("--threads", threads,
                                       "worker cap (0 = hardware); results do not depend on it");
    auto* mc_seed = mc->add_option("--seed", seed, "root seed");
    auto* mc_out = mc->add_option("--out", out_path, "output JSON path");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    }

    const json config = load_config(config_path);

    if (sim->parsed()) {
        sim_model.fill_from_config(section(config, "model"));
        sim_dist.fill_from_config(section(config, "sim"));
        const json sec = section(config, "sim");
        config_fill(sec, "years", opt_years, sim_years);
        config_fill(sec, "burn_in", opt_burn, sim_burn);
        config_fill(config, "seed", sim_seed, seed);
        config_fill(config, "out", sim_out, out_path);
        require_out(out_path);

        const PGarchSpec spec = sim_model.build_spec();
        SimConfig cfg;
        cfg.n_years = sim_years;
        cfg.burn_in = sim_burn;
        cfg.seed = seed;
        cfg.dist = sim_dist.build();
        // A cheap stationarity check feeds the warning path; unsupported order
        // combinations simply skip it.
        try {
            cfg.lyapunov_decision =
                lyapunov_mc(spec, cfg.dist, 1000, mix_seed(seed, 0xcafe)).decision;
        } catch (const std::invalid_argument&) {
        }
        std::vector<std::string> warnings;
        const Series path = simulate_path(spec, cfg, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        io::write_series_csv(out_path, path);
        return 0;
    }

    if (fit_cmd->parsed()) {
        fit_model.fill_from_config(section(config, "model"));
        fit_args.fill_from_config(section(config, "fit"));
        const json data = section(config, "data");
        config_fill(data, "path", opt_data, data_path);
        config_fill(data, "column", opt_col, column);
        config_fill(data, "offset", opt_off, offset);
        config_fill(config, "seed", fit_seed, seed);
        config_fill(config, "out", fit_out, out_path);
        if (data_path.empty()) throw std::invalid_argument("--data: an input path is required");
        require_out(out_path);

        const Series series =
            io::read_series_csv(data_path, fit_model.period, column, offset);
        const FitResult result = fit(series, fit_model.period, fit_model.order_q,
                                     fit_model.order_p, fit_args.build(seed));
        io::write_json(out_path, io::fit_result_to_json(result));
        return 0;
    }

    if (lya->parsed() || sta->parsed()) {
        ModelArgs& model = lya->parsed() ? lya_model : sta_model;
        DistArgs& dist_args = lya->parsed() ? lya_dist : sta_dist;
        model.fill_from_config(section(config, "model"));
        dist_args.fill_from_config(section(config, "lyapunov"));
        const json sec = section(config, "lyapunov");
        config_fill(sec, "blocks", lya->parsed() ? opt_blocks : sta_blocks, blocks);
        config_fill(sec, "z", lya->parsed() ? opt_z : sta_z, z);
        config_fill(sec, "n0_max", lya->parsed() ? opt_n0 : sta_n0, n0_max);
        config_fill(sec, "mc_size", lya->parsed() ? opt_mc : sta_mc, mc_size);
        config_fill(config, "seed", lya->parsed() ? lya_seed : sta_seed, seed);
        config_fill(config, "out", lya->parsed() ? lya_out : sta_out, out_path);

        const PGarchSpec spec = model.build_spec();
        const InnovationDist dist = dist_args.build();
        const json report =
            stationarity_report(spec, dist, blocks, z, n0_max, mc_size, !skip_delta, seed);

        if (sta->parsed()) {
            const auto& ly = report.at("lyapunov");
            std::cout << "decision: " << ly.at("decision").get<std::string>()
                      << " (gamma_hat = " << ly.at("gamma_hat").get<double>()
                      << ", se = " << ly.at("std_error").get<double>() << ", z = " << z << ")\n";
            if (!report.at("beta_spectral_radius").is_null())
                std::cout << "beta spectral radius: "
                          << report.at("beta_spectral_radius").get<double>() << '\n';
            if (!report.at("delta_search").is_null()) {
                const auto& ds = report.at("delta_search");
                if (ds.at("found").get<bool>())
                    std::cout << "fractional moment: delta = " << ds.at("delta").get<double>()
                              << " at n0 = " << ds.at("n0").get<int>() << '\n';
                else
                    std::cout << "fractional moment: not certified on the search grid\n";
            }
            if (!out_path.empty()) io::write_json(out_path, report);
        } else {
            require_out(out_path);
            io::write_json(out_path, report);
        }
        return 0;
    }

    if (!mc->parsed()) throw std::invalid_argument("no subcommand given");
    mc_model.fill_from_config(section(config, "model"));
    mc_dist.fill_from_config(section(config, "mc"));
    mc_fit.fill_from_config(section(config, "fit"));
    const json sec = section(config, "mc");
    config_fill(sec, "task", opt_task, task);
    config_fill(sec, "n_grid", opt_grid, n_grid_text);
    config_fill(sec, "years", opt_n, mc_years);
    config_fill(sec, "replications", opt_r, mc_reps);
    config_fill(sec, "j_years", opt_jy, j_years);
    config_fill(sec, "threads", opt_threads, threads);
    config_fill(config, "seed", mc_seed, seed);
    config_fill(config, "out", mc_out, out_path);
    require_out(out_path);

    const PGarchSpec spec0 = mc_model.build_spec();
    const InnovationDist dist = mc_dist.build();
    const FitOptions fit_opts = mc_fit.build(0); // per-replication seeds come from the harness
    const int n_workers =
        threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());

    MonteCarloReport report;
    if (task == "consistency") {
        const auto n_grid = parse_int_list(n_grid_text, "--n-grid");
        report = run_consistency(spec0, dist, n_grid, mc_reps, fit_opts, seed, n_workers);
    } else {
        report = run_normality(spec0, dist, mc_years, mc_reps, fit_opts, seed, n_workers);
    }
    if (j_years > 0) {
        const Eigen::MatrixXd j = j_reference(spec0, dist, j_years, mix_seed(seed, 0x1e77));
        report.j_cross_block_mass = cross_block_mass(j, spec0.period);
    }
    io::write_json(out_path, io::report_to_json(report, task));
    return 0;
}

} // namespace

int dispatch(std::vector<std::string> args) {
    try {
        return run(std::move(args));
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    }
}

} // namespace pgarch::cli
