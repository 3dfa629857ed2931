// pam: batch front-end for the parabolic Anderson model toolkit.
//
// Subcommands: check | kernels | moments | simulate | regularity | verify.
// All numerical work goes through the C API (pam/pam.h); this tool only
// parses configuration, orchestrates calls and writes CSV/JSON artifacts.
//
// Exit codes: 0 pass, 1 invariant failure, 2 configuration error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pam/pam.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& message) { throw CliError{code, message}; }

int map_status(int rc) {
    switch (rc) {
        case PAM_ERR_INVALID_ARGUMENT:
        case PAM_ERR_UNSUPPORTED:
            return 2;
        default:
            return 3;
    }
}

void call(int rc, const std::string& what) {
    if (rc != PAM_OK)
        die(map_status(rc), what + ": " + pam_last_error_message());
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Configuration.
// ---------------------------------------------------------------------------

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) die(2, "config: " + path + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            die(2, "config: unknown key '" + it.key() + "' in " + path);
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const std::exception&) {
        die(2, "config: key '" + key + "' has the wrong type");
    }
}

struct Config {
    int dimension = 1;
    double alpha = 0.5;
    double beta = 0.5;
    double horizon = 1.0;
    double domain_length = 16.0;
    pam_quadrature_options quad{};

    int table_n_max = 8;
    int table_n_grid = 512;
    std::vector<std::pair<double, double>> series_points;  // (t, gamma)

    int basis_temporal_rank = 32;
    int basis_mode_count = 64;
    int basis_time_cells = 256;

    uint64_t sim_seed = 1;
    int sim_replicates = 1000;
    int sim_chaos_order = 2;
    int sim_workers = 1;
    double sim_memory_budget_mb = 512.0;
    bool sim_dump_samples = false;
    std::vector<std::pair<double, double>> sim_points;  // (t, x)

    std::vector<double> moment_times{0.25, 0.5, 1.0};
    int moment_orders_max = 6;
    std::vector<double> moment_p_values{2.0, 4.0};
    int qmc_log2_points = 14;
    int qmc_shifts = 8;
    bool moments_with_mc = false;

    double reg_base_time = 0.5;
    int reg_lag_count = 9;
    double reg_lag_max = 1.0 / 16.0;
    double reg_lag_ratio = 0.5;
    std::vector<double> reg_eta_grid{0.3, 0.5, 0.9};
    std::vector<double> reg_times{0.25, 1.0};
    std::vector<double> reg_bound_lags;
    double reg_slope_margin = 0.05;
    double reg_proximity_tol = 0.15;
    uint64_t fuzz_samples = 1000000;
    uint64_t fuzz_seed = 42;

    std::string output_dir = ".";
    std::vector<std::string> formats{"csv", "json"};
};

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) die(2, "config: cannot open " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const std::exception& e) {
        die(2, std::string("config: JSON parse error: ") + e.what());
    }
    check_keys(root, "<root>",
               {"model", "horizon", "domain_length", "quadrature", "kernel_table", "basis",
                "simulation", "moments", "regularity", "report"});
    Config cfg;
    pam_quadrature_options_default(&cfg.quad);

    if (!root.contains("model")) die(2, "config: missing required 'model' block");
    const json& model = root.at("model");
    check_keys(model, "model", {"dimension", "alpha", "beta"});
    cfg.dimension = get_or<int>(model, "dimension", 1);
    cfg.alpha = get_or<double>(model, "alpha", 0.5);
    cfg.beta = get_or<double>(model, "beta", 0.5);

    cfg.horizon = get_or<double>(root, "horizon", 1.0);
    cfg.domain_length = get_or<double>(root, "domain_length", 16.0);
    if (cfg.horizon <= 0.0) die(2, "config: horizon must be > 0");
    if (cfg.domain_length <= 0.0) die(2, "config: domain_length must be > 0");

    if (root.contains("quadrature")) {
        const json& q = root.at("quadrature");
        check_keys(q, "quadrature", {"node_count", "abs_tol", "rel_tol", "singularity_split"});
        cfg.quad.node_count = get_or<int>(q, "node_count", cfg.quad.node_count);
        cfg.quad.abs_tol = get_or<double>(q, "abs_tol", cfg.quad.abs_tol);
        cfg.quad.rel_tol = get_or<double>(q, "rel_tol", cfg.quad.rel_tol);
        cfg.quad.singularity_split =
            get_or<double>(q, "singularity_split", cfg.quad.singularity_split);
        if (cfg.quad.node_count < 8) die(2, "config: quadrature.node_count must be >= 8");
        if (cfg.quad.abs_tol <= 0.0 || cfg.quad.rel_tol <= 0.0)
            die(2, "config: quadrature tolerances must be > 0");
        if (cfg.quad.singularity_split <= 0.0 || cfg.quad.singularity_split >= 1.0)
            die(2, "config: quadrature.singularity_split must lie in (0,1)");
    }

    if (root.contains("kernel_table")) {
        const json& kt = root.at("kernel_table");
        check_keys(kt, "kernel_table", {"n_max", "n_grid", "series_points"});
        cfg.table_n_max = get_or<int>(kt, "n_max", cfg.table_n_max);
        cfg.table_n_grid = get_or<int>(kt, "n_grid", cfg.table_n_grid);
        if (cfg.table_n_grid < 8) die(2, "config: kernel_table.n_grid must be >= 8");
        if (kt.contains("series_points")) {
            for (const json& sp : kt.at("series_points")) {
                check_keys(sp, "kernel_table.series_points[]", {"t", "gamma"});
                cfg.series_points.emplace_back(get_or<double>(sp, "t", 0.5),
                                               get_or<double>(sp, "gamma", 1.0));
            }
        }
    }
    if (cfg.series_points.empty())
        cfg.series_points = {{0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}, {1.0, 2.0}};

    if (root.contains("basis")) {
        const json& b = root.at("basis");
        check_keys(b, "basis", {"temporal_rank", "mode_count", "time_cells"});
        cfg.basis_temporal_rank = get_or<int>(b, "temporal_rank", cfg.basis_temporal_rank);
        cfg.basis_mode_count = get_or<int>(b, "mode_count", cfg.basis_mode_count);
        cfg.basis_time_cells = get_or<int>(b, "time_cells", cfg.basis_time_cells);
    }

    if (root.contains("simulation")) {
        const json& s = root.at("simulation");
        check_keys(s, "simulation",
                   {"seed", "replicates", "chaos_order", "workers", "memory_budget_mb",
                    "dump_samples", "points"});
        cfg.sim_seed = get_or<uint64_t>(s, "seed", cfg.sim_seed);
        cfg.sim_replicates = get_or<int>(s, "replicates", cfg.sim_replicates);
        cfg.sim_chaos_order = get_or<int>(s, "chaos_order", cfg.sim_chaos_order);
        cfg.sim_workers = get_or<int>(s, "workers", cfg.sim_workers);
        cfg.sim_memory_budget_mb = get_or<double>(s, "memory_budget_mb", cfg.sim_memory_budget_mb);
        cfg.sim_dump_samples = get_or<bool>(s, "dump_samples", cfg.sim_dump_samples);
        if (s.contains("points")) {
            for (const json& p : s.at("points")) {
                check_keys(p, "simulation.points[]", {"t", "x"});
                cfg.sim_points.emplace_back(get_or<double>(p, "t", 0.5),
                                            get_or<double>(p, "x", 0.0));
            }
        }
        if (cfg.sim_replicates < 1) die(2, "config: simulation.replicates must be >= 1");
        if (cfg.sim_chaos_order != 1 && cfg.sim_chaos_order != 2)
            die(2, "config: simulation.chaos_order must be 1 or 2");
        if (cfg.sim_workers < 1 || cfg.sim_workers > 64)
            die(2, "config: simulation.workers must lie in [1,64]");
        for (auto& [t, x] : cfg.sim_points) {
            if (t <= 0.0 || t > cfg.horizon)
                die(2, "config: simulation point time outside (0, horizon]");
            if (x < 0.0 || x > cfg.domain_length)
                die(2, "config: simulation point position outside [0, domain_length]");
        }
    }
    if (cfg.sim_points.empty()) cfg.sim_points = {{0.5, 0.3}};

    if (root.contains("moments")) {
        const json& m = root.at("moments");
        check_keys(m, "moments",
                   {"times", "orders_max", "p_values", "qmc_log2_points", "qmc_shifts",
                    "with_mc"});
        if (m.contains("times")) cfg.moment_times = m.at("times").get<std::vector<double>>();
        cfg.moment_orders_max = get_or<int>(m, "orders_max", cfg.moment_orders_max);
        if (m.contains("p_values"))
            cfg.moment_p_values = m.at("p_values").get<std::vector<double>>();
        cfg.qmc_log2_points = get_or<int>(m, "qmc_log2_points", cfg.qmc_log2_points);
        cfg.qmc_shifts = get_or<int>(m, "qmc_shifts", cfg.qmc_shifts);
        cfg.moments_with_mc = get_or<bool>(m, "with_mc", cfg.moments_with_mc);
        for (double t : cfg.moment_times)
            if (t < 0.0 || t > cfg.horizon) die(2, "config: moments.times outside [0, horizon]");
    }

    if (root.contains("regularity")) {
        const json& r = root.at("regularity");
        check_keys(r, "regularity",
                   {"base_time", "lag_count", "lag_max", "lag_ratio", "eta_grid", "times",
                    "bound_lags", "slope_margin", "proximity_tol", "fuzz_samples", "fuzz_seed"});
        cfg.reg_base_time = get_or<double>(r, "base_time", cfg.reg_base_time);
        cfg.reg_lag_count = get_or<int>(r, "lag_count", cfg.reg_lag_count);
        cfg.reg_lag_max = get_or<double>(r, "lag_max", cfg.reg_lag_max);
        cfg.reg_lag_ratio = get_or<double>(r, "lag_ratio", cfg.reg_lag_ratio);
        if (r.contains("eta_grid")) cfg.reg_eta_grid = r.at("eta_grid").get<std::vector<double>>();
        if (r.contains("times")) cfg.reg_times = r.at("times").get<std::vector<double>>();
        if (r.contains("bound_lags"))
            cfg.reg_bound_lags = r.at("bound_lags").get<std::vector<double>>();
        cfg.reg_slope_margin = get_or<double>(r, "slope_margin", cfg.reg_slope_margin);
        cfg.reg_proximity_tol = get_or<double>(r, "proximity_tol", cfg.reg_proximity_tol);
        cfg.fuzz_samples = get_or<uint64_t>(r, "fuzz_samples", cfg.fuzz_samples);
        cfg.fuzz_seed = get_or<uint64_t>(r, "fuzz_seed", cfg.fuzz_seed);
        if (cfg.reg_lag_count < 6) die(2, "config: regularity.lag_count must be >= 6");
        if (cfg.reg_lag_ratio <= 0.0 || cfg.reg_lag_ratio >= 1.0)
            die(2, "config: regularity.lag_ratio must lie in (0,1)");
        if (cfg.reg_base_time <= 0.0 || cfg.reg_base_time >= cfg.horizon)
            die(2, "config: regularity.base_time must lie in (0, horizon)");
    }
    if (cfg.reg_bound_lags.empty())
        for (int k = 2; k <= 10; ++k) cfg.reg_bound_lags.push_back(std::pow(2.0, -k));

    if (root.contains("report")) {
        const json& rep = root.at("report");
        check_keys(rep, "report", {"output_dir", "formats"});
        cfg.output_dir = get_or<std::string>(rep, "output_dir", cfg.output_dir);
        if (rep.contains("formats"))
            cfg.formats = rep.at("formats").get<std::vector<std::string>>();
        for (const std::string& f : cfg.formats)
            if (f != "csv" && f != "json") die(2, "config: report.formats entries must be csv|json");
    }
    return cfg;
}

struct ModelHandle {
    pam_model* ptr = nullptr;
    explicit ModelHandle(const Config& cfg) {
        call(pam_model_create(cfg.dimension, cfg.alpha, cfg.beta, &cfg.quad, &ptr),
             "model creation");
    }
    ~ModelHandle() { pam_model_free(ptr); }
    ModelHandle(const ModelHandle&) = delete;
    ModelHandle& operator=(const ModelHandle&) = delete;
};

// ---------------------------------------------------------------------------
// Output plumbing: everything is composed in memory, then written at the end
// so a failing run leaves no partial artifacts.
// ---------------------------------------------------------------------------

struct OutputSet {
    fs::path dir;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    json manifest_outputs = json::array();

    void add(const std::string& name, const std::string& content,
             const std::vector<std::string>& operations) {
        files.emplace_back(name, content);
        manifest_outputs.push_back({{"file", name}, {"operations", operations}});
    }

    void write(const std::string& command, const Config& cfg, uint64_t seed_used) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) die(3, "cannot create output directory " + dir.string());
        json manifest;
        manifest["command"] = command;
        manifest["model"] = {{"dimension", cfg.dimension}, {"alpha", cfg.alpha}, {"beta", cfg.beta}};
        manifest["horizon"] = cfg.horizon;
        manifest["domain_length"] = cfg.domain_length;
        manifest["quadrature"] = {{"node_count", cfg.quad.node_count},
                                  {"abs_tol", cfg.quad.abs_tol},
                                  {"rel_tol", cfg.quad.rel_tol},
                                  {"singularity_split", cfg.quad.singularity_split}};
        manifest["basis"] = {{"temporal_rank", cfg.basis_temporal_rank},
                             {"mode_count", cfg.basis_mode_count},
                             {"time_cells", cfg.basis_time_cells}};
        manifest["simulation"] = {{"replicates", cfg.sim_replicates},
                                  {"chaos_order", cfg.sim_chaos_order}};
        manifest["seed"] = seed_used;
        manifest["outputs"] = manifest_outputs;
        files.emplace_back("manifest.json", manifest.dump(2) + "\n");
        for (const auto& [name, content] : files) {
            std::ofstream out(dir / name, std::ios::binary);
            if (!out) die(3, "cannot open output file " + (dir / name).string());
            out << content;
            if (!out) die(3, "write failed for " + (dir / name).string());
        }
    }
};

bool wants(const Config& cfg, const std::string& fmt) {
    for (const std::string& f : cfg.formats)
        if (f == fmt) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

int cmd_check(const Config& cfg, OutputSet& out) {
    ModelHandle model(cfg);
    double dalang = 0.0, eta_star = 0.0;
    call(pam_dalang_integral(model.ptr, &dalang), "dalang integral");
    call(pam_minimal_eta(model.ptr, &eta_star), "minimal eta");

    json holder_grid = json::array();
    bool consistent = true;
    for (int i = 1; i <= 20; ++i) {
        double eta = i / 21.0;
        double hv = 0.0, kv = 0.0;
        call(pam_holder_integral(model.ptr, eta, &hv), "holder integral");
        call(pam_holder_energy_integral(model.ptr, eta, &kv), "energy holder integral");
        bool h_fin = std::isfinite(hv), k_fin = std::isfinite(kv);
        if (h_fin != k_fin) consistent = false;
        holder_grid.push_back({{"eta", eta},
                               {"holder_integral", h_fin ? json(hv) : json("inf")},
                               {"energy_integral", k_fin ? json(kv) : json("inf")},
                               {"finite", h_fin}});
    }

    bool dalang_ok = std::isfinite(dalang);
    json report;
    report["dalang"] = {{"finite", dalang_ok}, {"value", dalang}};
    report["minimal_eta"] = eta_star;
    report["theta1_max"] = 0.5 * (1.0 - eta_star);
    report["theta2_max"] = 1.0 - eta_star;
    report["holder_grid"] = holder_grid;
    report["energy_condition_equivalent"] = consistent;
    report["pass"] = dalang_ok && consistent;
    out.add("check.json", report.dump(2) + "\n",
            {"dalang_integral", "holder_integral", "holder_energy_integral", "minimal_eta"});
    return report["pass"].get<bool>() ? 0 : 1;
}

int cmd_kernels(const Config& cfg, OutputSet& out) {
    ModelHandle model(cfg);
    pam_kernel_table* table = nullptr;
    call(pam_kernel_table_build(model.ptr, cfg.table_n_max, cfg.horizon, cfg.table_n_grid, &table),
         "kernel table build");

    int n_grid = 0, n_max = 0;
    pam_kernel_table_size(table, &n_grid, &n_max);
    std::string csv = "t,k";
    for (int n = 1; n <= n_max; ++n) csv += ",h" + std::to_string(n);
    csv += "\n";
    std::vector<double> h(n_max);
    double worst_h = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        double t = 0.0, k = 0.0;
        call(pam_kernel_table_row(table, i, &t, &k, h.data()), "kernel table row");
        csv += fmt17(t) + "," + fmt17(k);
        for (int n = 1; n <= n_max; ++n) csv += "," + fmt17(h[n - 1]);
        csv += "\n";
        if (i % std::max(1, n_grid / 8) == 0 || i + 1 == n_grid) {
            for (int n = 1; n <= std::min(5, n_max); ++n) {
                double ref = 0.0;
                call(pam_convolution_power(model.ptr, n, t, &ref), "closed-form h");
                worst_h = std::max(worst_h, std::abs(h[n - 1] / ref - 1.0));
            }
        }
    }
    char self[96];
    std::snprintf(self, sizeof(self), "# selftest max_rel_err_h=%.3g\n", worst_h);
    csv += self;
    pam_kernel_table_free(table);
    if (wants(cfg, "csv")) out.add("kernel_table.csv", csv, {"kernel_table", "convolution_power"});

    std::string series_csv = "t,gamma,H,H_trunc_index,H_tilde,H_tilde_trunc_index\n";
    for (auto [t, g] : cfg.series_points) {
        double hv = 0.0, hs = 0.0;
        int ih = 0, is = 0;
        call(pam_moment_series(model.ptr, t, g, 1e-12, &hv, &ih), "moment series");
        call(pam_moment_series_sqrt(model.ptr, t, g, 1e-12, &hs, &is), "moment series sqrt");
        series_csv += fmt17(t) + "," + fmt17(g) + "," + fmt17(hv) + "," + std::to_string(ih) +
                      "," + fmt17(hs) + "," + std::to_string(is) + "\n";
    }
    if (wants(cfg, "csv"))
        out.add("kernel_series.csv", series_csv, {"moment_series", "moment_series_sqrt"});
    return worst_h < 1e-6 ? 0 : 1;
}

int cmd_moments(const Config& cfg, OutputSet& out, uint64_t seed) {
    ModelHandle model(cfg);
    std::string csv = "kind,n,t,lag,value,stderr,bound\n";
    bool pass = true;
    json summary = json::array();

    // t = 0 row: vanishing chaos moments, unit second-moment bound.
    csv += "alpha_exact,1,0,0,0,0,0\n";
    csv += "second_moment_bound,0,0,0,1,0,1\n";

    for (double t : cfg.moment_times) {
        if (t == 0.0) continue;
        double a1 = 0.0;
        call(pam_chaos1_second_moment(model.ptr, t, &a1), "alpha_1");
        double b1 = 0.0;
        call(pam_chaos_moment_bound(model.ptr, 1, t, &b1), "alpha_1 bound");
        csv += "alpha_exact,1," + fmt17(t) + ",0," + fmt17(a1) + ",0," + fmt17(b1) + "\n";
        if (a1 > b1) pass = false;

        double a2 = 0.0, a2se = 0.0;
        call(pam_chaos2_second_moment_qmc(model.ptr, t, seed, cfg.qmc_log2_points,
                                          cfg.qmc_shifts, &a2, &a2se),
             "alpha_2 qmc");
        double b2 = 0.0;
        call(pam_chaos_moment_bound(model.ptr, 2, t, &b2), "alpha_2 bound");
        csv += "alpha_exact_qmc,2," + fmt17(t) + ",0," + fmt17(a2) + "," + fmt17(a2se) + "," +
               fmt17(b2) + "\n";
        if (a2 > b2 + 3.0 * a2se) pass = false;

        for (int n = 0; n <= cfg.moment_orders_max; ++n) {
            double bn = 0.0;
            call(pam_chaos_moment_bound(model.ptr, n, t, &bn), "alpha_n bound");
            csv += "alpha_bound," + std::to_string(n) + "," + fmt17(t) + ",0," + fmt17(bn) +
                   ",0," + fmt17(bn) + "\n";
        }
        double m2b = 0.0;
        call(pam_solution_second_moment_bound(model.ptr, t, &m2b), "second moment bound");
        csv += "second_moment_bound,0," + fmt17(t) + ",0," + fmt17(m2b) + ",0," + fmt17(m2b) +
               "\n";
        for (double p : cfg.moment_p_values) {
            double pb = 0.0;
            call(pam_solution_p_moment_bound(model.ptr, t, p, &pb), "p moment bound");
            csv += "p_moment_bound," + std::to_string((int)p) + "," + fmt17(t) + ",0," +
                   fmt17(pb) + ",0," + fmt17(pb) + "\n";
        }
        summary.push_back({{"t", t},
                           {"alpha1", a1},
                           {"alpha1_bound", b1},
                           {"alpha2_qmc", a2},
                           {"alpha2_se", a2se},
                           {"alpha2_bound", b2},
                           {"bound_dominates", a1 <= b1 && a2 <= b2 + 3.0 * a2se}});
    }

    if (cfg.moments_with_mc) {
        pam_noise_basis* basis = nullptr;
        call(pam_noise_basis_build(model.ptr, cfg.horizon, cfg.domain_length,
                                   cfg.basis_temporal_rank, cfg.basis_mode_count,
                                   cfg.basis_time_cells, &basis),
             "noise basis");
        pam_sim_options opts{seed, cfg.sim_replicates, cfg.sim_chaos_order, cfg.sim_workers,
                             cfg.sim_memory_budget_mb};
        std::vector<double> pts;
        for (auto [t, x] : cfg.sim_points) {
            pts.push_back(t);
            pts.push_back(x);
        }
        std::vector<pam_point_stats> stats(cfg.sim_points.size());
        std::vector<double> samples(cfg.sim_points.size() * cfg.sim_replicates);
        call(pam_simulate(basis, &opts, pts.data(), (int)cfg.sim_points.size(), stats.data(),
                          samples.data()),
             "simulate");
        for (size_t i = 0; i < stats.size(); ++i) {
            for (double p : cfg.moment_p_values) {
                double est = 0.0, se = 0.0;
                call(pam_mc_moment(samples.data() + i * cfg.sim_replicates, cfg.sim_replicates,
                                   p, &est, &se),
                     "mc moment");
                double bound = 0.0;
                if (p == 2.0) {
                    call(pam_solution_second_moment_bound(model.ptr, stats[i].t, &bound),
                         "second moment bound");
                } else {
                    call(pam_solution_p_moment_bound(model.ptr, stats[i].t, p, &bound),
                         "p moment bound");
                    bound = std::pow(bound, p);
                }
                csv += "mc_moment_p" + std::to_string((int)p) + ",0," + fmt17(stats[i].t) +
                       ",0," + fmt17(est) + "," + fmt17(se) + "," + fmt17(bound) + "\n";
                if (est > bound + 3.0 * se) pass = false;
            }
        }
        pam_noise_basis_free(basis);
    }

    if (wants(cfg, "csv"))
        out.add("moments.csv", csv,
                {"chaos1_second_moment", "chaos2_second_moment_qmc", "chaos_moment_bound",
                 "solution_second_moment_bound", "solution_p_moment_bound"});
    if (wants(cfg, "json")) {
        json report;
        report["rows"] = summary;
        report["pass"] = pass;
        out.add("moments.json", report.dump(2) + "\n", {"moment summary"});
    }
    return pass ? 0 : 1;
}

int cmd_simulate(const Config& cfg, OutputSet& out, uint64_t seed, int workers) {
    ModelHandle model(cfg);
    pam_noise_basis* basis = nullptr;
    call(pam_noise_basis_build(model.ptr, cfg.horizon, cfg.domain_length,
                               cfg.basis_temporal_rank, cfg.basis_mode_count,
                               cfg.basis_time_cells, &basis),
         "noise basis");
    pam_sim_options opts{seed, cfg.sim_replicates, cfg.sim_chaos_order, workers,
                         cfg.sim_memory_budget_mb};
    std::vector<double> pts;
    for (auto [t, x] : cfg.sim_points) {
        pts.push_back(t);
        pts.push_back(x);
    }
    std::vector<pam_point_stats> stats(cfg.sim_points.size());
    std::vector<double> samples;
    if (cfg.sim_dump_samples) samples.resize(cfg.sim_points.size() * cfg.sim_replicates);
    int rc = pam_simulate(basis, &opts, pts.data(), (int)cfg.sim_points.size(), stats.data(),
                          cfg.sim_dump_samples ? samples.data() : nullptr);
    pam_noise_basis_free(basis);
    call(rc, "simulate");

    std::string csv =
        "t,x,mean_u,mean_u_se,var_j1,var_j1_se,exact_var_j1,alpha1,deficit,var_j2,var_j2_se,"
        "exact_var_j2,cov_j1_j2,cov_j1_j2_se,m2,m2_se,m2_bound,m4,m4_se,m4_bound\n";
    bool pass = true;
    for (const pam_point_stats& s : stats) {
        double a1 = 0.0, vfull = 0.0;
        call(pam_chaos1_second_moment(model.ptr, s.t, &a1), "alpha_1");
        call(pam_lattice_var_j1(model.ptr, cfg.horizon, cfg.domain_length, cfg.basis_time_cells,
                                s.t, &vfull),
             "lattice variance");
        double deficit = vfull - s.exact_var_j1;
        double m2b = 0.0, m4b = 0.0;
        call(pam_solution_second_moment_bound(model.ptr, s.t, &m2b), "second moment bound");
        call(pam_solution_p_moment_bound(model.ptr, s.t, 4.0, &m4b), "p moment bound");
        m4b = std::pow(m4b, 4.0);
        if (s.moment2 > m2b + 3.0 * s.moment2_se) pass = false;
        if (s.moment4 > m4b + 3.0 * s.moment4_se) pass = false;
        csv += fmt17(s.t) + "," + fmt17(s.x) + "," + fmt17(s.mean_u) + "," + fmt17(s.mean_u_se) +
               "," + fmt17(s.var_j1) + "," + fmt17(s.var_j1_se) + "," + fmt17(s.exact_var_j1) +
               "," + fmt17(a1) + "," + fmt17(deficit) + "," + fmt17(s.var_j2) + "," +
               fmt17(s.var_j2_se) + "," + fmt17(s.exact_var_j2) + "," + fmt17(s.cov_j1_j2) +
               "," + fmt17(s.cov_j1_j2_se) + "," + fmt17(s.moment2) + "," + fmt17(s.moment2_se) +
               "," + fmt17(m2b) + "," + fmt17(s.moment4) + "," + fmt17(s.moment4_se) + "," +
               fmt17(m4b) + "\n";
    }
    out.add("sim_moments.csv", csv,
            {"simulate_chaos", "basis_var_j1", "lattice_var_j1", "chaos1_second_moment",
             "solution_second_moment_bound", "solution_p_moment_bound"});

    if (cfg.sim_dump_samples) {
        std::string dump = "replicate,t,x,u\n";
        for (size_t i = 0; i < cfg.sim_points.size(); ++i)
            for (int r = 0; r < cfg.sim_replicates; ++r)
                dump += std::to_string(r) + "," + fmt17(cfg.sim_points[i].first) + "," +
                        fmt17(cfg.sim_points[i].second) + "," +
                        fmt17(samples[i * cfg.sim_replicates + r]) + "\n";
        out.add("samples.csv", dump, {"simulate_chaos"});
    }
    return pass ? 0 : 1;
}

int cmd_regularity(const Config& cfg, OutputSet& out) {
    ModelHandle model(cfg);
    bool pass = true;
    json report;

    std::vector<double> lags(cfg.reg_lag_count);
    for (int i = 0; i < cfg.reg_lag_count; ++i)
        lags[i] = cfg.reg_lag_max * std::pow(cfg.reg_lag_ratio, i);

    std::string fit_csv = "direction,lag,moment,fitted\n";
    json fits = json::array();
    for (int dir = 0; dir <= 1; ++dir) {
        std::vector<double> moments(lags.size());
        pam_regularity_fit fit{};
        call(pam_fit_increment_exponent(model.ptr, dir, cfg.reg_base_time, lags.data(),
                                        (int)lags.size(), cfg.reg_slope_margin,
                                        cfg.reg_proximity_tol, moments.data(), &fit),
             "exponent fit");
        for (size_t i = 0; i < lags.size(); ++i) {
            double fitted = std::exp(fit.intercept + fit.slope * std::log(lags[i]));
            fit_csv += std::string(dir == 0 ? "time" : "space") + "," + fmt17(lags[i]) + "," +
                       fmt17(moments[i]) + "," + fmt17(fitted) + "\n";
        }
        fits.push_back({{"direction", dir == 0 ? "time" : "space"},
                        {"slope", fit.slope},
                        {"theory_exponent", fit.theory_exponent},
                        {"rms_residual", fit.rms_residual},
                        {"pass_lower", fit.pass_lower != 0},
                        {"proximity_ok", fit.proximity_ok != 0}});
        if (!fit.pass_lower) pass = false;
    }
    report["exponent_fits"] = fits;

    json sup = json::array();
    for (double t : cfg.reg_times) {
        std::vector<double> shifts{0.0, 0.25 / std::sqrt(t), 0.5 / std::sqrt(t),
                                   1.0 / std::sqrt(t), 2.0 / std::sqrt(t), 4.0 / std::sqrt(t),
                                   8.0 / std::sqrt(t)};
        pam_shift_maximality_report rep{};
        call(pam_verify_shift_maximality(model.ptr, t, shifts.data(), (int)shifts.size(),
                                         nullptr, &rep),
             "shift maximality");
        sup.push_back({{"t", t},
                       {"reference", rep.reference},
                       {"max_value", rep.max_value},
                       {"max_shift", rep.max_shift},
                       {"pass", rep.pass != 0}});
        if (!rep.pass) pass = false;
    }
    report["shift_maximality"] = sup;

    json bounds = json::array();
    double worst_slack = 0.0;
    for (double t : cfg.reg_times) {
        std::vector<double> shifts{0.0, 0.5 / std::sqrt(t), 1.0 / std::sqrt(t),
                                   2.0 / std::sqrt(t), 4.0 / std::sqrt(t)};
        for (double eta : cfg.reg_eta_grid) {
            for (double lag : cfg.reg_bound_lags) {
                pam_increment_bound_report tb{};
                call(pam_verify_time_increment_bound(model.ptr, t, lag, eta, shifts.data(),
                                                     (int)shifts.size(), &tb),
                     "time increment bound");
                if (!tb.pass) pass = false;
                worst_slack = std::max(worst_slack, tb.slack_ratio);
                std::vector<double> z(cfg.dimension, 0.0);
                z[0] = lag;
                pam_increment_bound_report sb{};
                call(pam_verify_space_increment_bound(model.ptr, t, z.data(), cfg.dimension,
                                                      eta, shifts.data(), (int)shifts.size(),
                                                      &sb),
                     "space increment bound");
                if (!sb.pass) pass = false;
                worst_slack = std::max(worst_slack, sb.slack_ratio);
                bounds.push_back({{"t", t},
                                  {"eta", eta},
                                  {"lag", lag},
                                  {"time_slack", tb.slack_ratio},
                                  {"space_slack", sb.slack_ratio},
                                  {"pass", tb.pass != 0 && sb.pass != 0}});
            }
        }
    }
    report["increment_bounds"] = bounds;
    report["worst_slack_ratio"] = worst_slack;

    pam_inequality_entry entries[5];
    int n_entries = 0, fuzz_pass = 0;
    call(pam_fuzz_scalar_inequalities(cfg.fuzz_samples, cfg.fuzz_seed, entries, &n_entries,
                                      &fuzz_pass),
         "scalar inequality fuzz");
    json fuzz = json::array();
    for (int i = 0; i < n_entries; ++i)
        fuzz.push_back({{"name", entries[i].name},
                        {"violations", entries[i].violations},
                        {"worst_slack", entries[i].worst_slack},
                        {"asserted", entries[i].asserted != 0}});
    report["scalar_inequalities"] = fuzz;
    if (!fuzz_pass) pass = false;

    report["pass"] = pass;
    if (wants(cfg, "csv")) out.add("regularity.csv", fit_csv, {"fit_increment_exponent"});
    if (wants(cfg, "json"))
        out.add("regularity.json", report.dump(2) + "\n",
                {"fit_increment_exponent", "verify_shift_maximality",
                 "verify_time_increment_bound", "verify_space_increment_bound",
                 "fuzz_scalar_inequalities"});
    return pass ? 0 : 1;
}

int cmd_verify(const Config& cfg, OutputSet& out, uint64_t seed) {
    ModelHandle model(cfg);
    json checks = json::array();
    bool all_pass = true;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << (detail.empty() ? "" : ": " + detail)
                  << "\n";
        checks.push_back({{"name", name}, {"pass", ok}, {"detail", detail}});
        if (!ok) all_pass = false;
    };

    {
        double dal = 0.0;
        call(pam_dalang_integral(model.ptr, &dal), "dalang");
        record("dalang_condition", std::isfinite(dal), "value " + fmt17(dal));
    }
    {
        double worst = 0.0;
        for (double t : {0.25, 0.5, 1.0}) {
            double kc = 0.0, kq = 0.0;
            call(pam_propagator_energy(model.ptr, t, &kc), "k closed");
            call(pam_propagator_energy_quadrature(model.ptr, t, &kq), "k quadrature");
            worst = std::max(worst, std::abs(kq / kc - 1.0));
        }
        record("propagator_energy_quadrature_agrees", worst < 1e-8, "max rel err " + fmt17(worst));
    }
    {
        pam_kernel_table* table = nullptr;
        call(pam_kernel_table_build(model.ptr, std::min(cfg.table_n_max, 6), cfg.horizon,
                                    std::min(cfg.table_n_grid, 512), &table),
             "kernel table");
        int n_grid = 0, n_max = 0;
        pam_kernel_table_size(table, &n_grid, &n_max);
        std::vector<double> h(n_max);
        double worst = 0.0;
        for (int i = n_grid / 4; i < n_grid; i += std::max(1, n_grid / 4)) {
            double t = 0.0, k = 0.0;
            call(pam_kernel_table_row(table, i, &t, &k, h.data()), "table row");
            for (int n = 1; n <= std::min(5, n_max); ++n) {
                double ref = 0.0;
                call(pam_convolution_power(model.ptr, n, t, &ref), "h closed");
                worst = std::max(worst, std::abs(h[n - 1] / ref - 1.0));
            }
        }
        pam_kernel_table_free(table);
        record("kernel_chain_quadrature_agrees", worst < 1e-6, "max rel err " + fmt17(worst));
    }
    {
        bool ok = true;
        std::string detail;
        for (double t : {0.25, 0.5, 1.0}) {
            double a1 = 0.0, b1 = 0.0, a2 = 0.0, a2se = 0.0, b2 = 0.0;
            call(pam_chaos1_second_moment(model.ptr, t, &a1), "alpha1");
            call(pam_chaos_moment_bound(model.ptr, 1, t, &b1), "bound1");
            call(pam_chaos2_second_moment_qmc(model.ptr, t, seed, cfg.qmc_log2_points,
                                              cfg.qmc_shifts, &a2, &a2se),
                 "alpha2");
            call(pam_chaos_moment_bound(model.ptr, 2, t, &b2), "bound2");
            if (a1 > b1 || a2 > b2 + 3.0 * a2se) ok = false;
        }
        record("chaos_moment_bounds_dominate", ok, detail);
    }
    {
        bool ok = true;
        double worst = 0.0;
        for (double t : cfg.reg_times) {
            std::vector<double> shifts{0.0, 1.0 / std::sqrt(t), 4.0 / std::sqrt(t)};
            pam_shift_maximality_report rep{};
            call(pam_verify_shift_maximality(model.ptr, t, shifts.data(), (int)shifts.size(),
                                             nullptr, &rep),
                 "shift maximality");
            if (!rep.pass) ok = false;
            for (double eta : cfg.reg_eta_grid)
                for (double lag : cfg.reg_bound_lags) {
                    pam_increment_bound_report tb{}, sb{};
                    call(pam_verify_time_increment_bound(model.ptr, t, lag, eta, shifts.data(),
                                                         (int)shifts.size(), &tb),
                         "prop time");
                    std::vector<double> z(cfg.dimension, 0.0);
                    z[0] = lag;
                    call(pam_verify_space_increment_bound(model.ptr, t, z.data(), cfg.dimension,
                                                          eta, shifts.data(),
                                                          (int)shifts.size(), &sb),
                         "prop space");
                    if (!tb.pass || !sb.pass) ok = false;
                    worst = std::max({worst, tb.slack_ratio, sb.slack_ratio});
                }
        }
        record("propagator_increment_bounds", ok, "worst slack ratio " + fmt17(worst));
    }
    {
        pam_inequality_entry entries[5];
        int n_entries = 0, fuzz_pass = 0;
        call(pam_fuzz_scalar_inequalities(cfg.fuzz_samples, cfg.fuzz_seed, entries, &n_entries,
                                          &fuzz_pass),
             "fuzz");
        record("scalar_inequalities", fuzz_pass != 0, "");
    }

    json report;
    report["checks"] = checks;
    report["pass"] = all_pass;
    out.add("verify.json", report.dump(2) + "\n", {"verification battery"});
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parabolic Anderson model toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir_override;
    std::optional<uint64_t> seed_override;
    std::optional<int> workers_override;

    for (const char* name : {"check", "kernels", "moments", "simulate", "regularity", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir_override, "output directory override");
        sub->add_option("--seed", seed_override, "master seed override");
        sub->add_option("--workers", workers_override, "worker count override");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        Config cfg = load_config(config_path);
        uint64_t seed = seed_override.value_or(cfg.sim_seed);
        int workers = workers_override.value_or(cfg.sim_workers);
        if (workers < 1 || workers > 64) die(2, "workers must lie in [1,64]");

        OutputSet out;
        out.dir = out_dir_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir_override);

        const std::string command = app.get_subcommands().front()->get_name();
        int status = 0;
        if (command == "check") status = cmd_check(cfg, out);
        else if (command == "kernels") status = cmd_kernels(cfg, out);
        else if (command == "moments") status = cmd_moments(cfg, out, seed);
        else if (command == "simulate") status = cmd_simulate(cfg, out, seed, workers);
        else if (command == "regularity") status = cmd_regularity(cfg, out);
        else status = cmd_verify(cfg, out, seed);

        out.write(command, cfg, seed);
        return status;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
