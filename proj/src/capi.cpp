// Glue between the public C interface and the C++ core.

#include "pam/pam.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "pam/chaos.hpp"
#include "pam/kernels.hpp"
#include "pam/noise.hpp"
#include "pam/regularity.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(PAM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const pam::NumericalError& e) {
        return fail(PAM_ERR_NUMERICAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PAM_ERR_NOMEM, "out of memory");
    } catch (const std::exception& e) {
        return fail(PAM_ERR_INTERNAL, e.what());
    }
}

pam::QuadratureSpec to_spec(const pam_quadrature_options* opts) {
    pam::QuadratureSpec spec;
    if (opts) {
        spec.node_count = opts->node_count;
        spec.abs_tol = opts->abs_tol;
        spec.rel_tol = opts->rel_tol;
        spec.singularity_split = opts->singularity_split;
    }
    return spec;
}

} // namespace

struct pam_model {
    pam::NoiseModel core;
};

struct pam_kernel_table {
    pam::KernelTable core;
};

struct pam_noise_basis {
    pam::NoiseBasis core;
};

extern "C" {

const char* pam_last_error_message(void) { return g_last_error.c_str(); }

void pam_quadrature_options_default(pam_quadrature_options* opts) {
    if (!opts) return;
    pam::QuadratureSpec spec;
    opts->node_count = spec.node_count;
    opts->abs_tol = spec.abs_tol;
    opts->rel_tol = spec.rel_tol;
    opts->singularity_split = spec.singularity_split;
}

int pam_model_create(int dimension, double alpha, double beta,
                     const pam_quadrature_options* quad, pam_model** out) {
    if (!out) return fail(PAM_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = nullptr;
    return guarded([&] {
        auto model = pam::NoiseModel::create(dimension, alpha, beta, to_spec(quad));
        *out = new pam_model{model};
        return PAM_OK;
    });
}

void pam_model_free(pam_model* model) { delete model; }

#define PAM_CHECK_ARGS(...)                                          \
    do {                                                             \
        if (!(__VA_ARGS__)) return fail(PAM_ERR_INVALID_ARGUMENT, "null argument"); \
    } while (0)

int pam_gamma_eval(const pam_model* model, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::gamma_eval(model->core.temporal, t);
        return PAM_OK;
    });
}

int pam_covariance_mass(const pam_model* model, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::covariance_mass(model->core.temporal, t);
        return PAM_OK;
    });
}

int pam_dalang_integral(const pam_model* model, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::dalang_integral(model->core.spatial, model->core.quad);
        return PAM_OK;
    });
}

int pam_holder_integral(const pam_model* model, double eta, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::holder_integral(model->core.spatial, eta, model->core.quad);
        return PAM_OK;
    });
}

int pam_minimal_eta(const pam_model* model, double* out) {
    PAM_CHECK_ARGS(model && out);
    *out = pam::minimal_eta(model->core.spatial);
    return PAM_OK;
}

int pam_propagator_energy(const pam_model* model, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::propagator_energy(model->core.spatial, t);
        return PAM_OK;
    });
}

int pam_propagator_energy_quadrature(const pam_model* model, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::propagator_energy_quadrature(model->core.spatial, t, model->core.quad);
        return PAM_OK;
    });
}

int pam_convolution_power(const pam_model* model, int order, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::convolution_power(model->core.spatial, order, t);
        return PAM_OK;
    });
}

int pam_holder_energy_integral(const pam_model* model, double eta, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::holder_energy_integral(model->core.spatial, eta, model->core.quad);
        return PAM_OK;
    });
}

int pam_weighted_energy_integral(const pam_model* model, double t, double theta, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::weighted_energy_integral(model->core.spatial, t, theta, model->core.quad);
        return PAM_OK;
    });
}

int pam_kernel_table_build(const pam_model* model, int n_max, double horizon, int n_grid,
                           pam_kernel_table** out) {
    PAM_CHECK_ARGS(model && out);
    *out = nullptr;
    return guarded([&] {
        auto table =
            pam::build_kernel_table(model->core.spatial, n_max, horizon, n_grid, model->core.quad);
        *out = new pam_kernel_table{std::move(table)};
        return PAM_OK;
    });
}

void pam_kernel_table_free(pam_kernel_table* table) { delete table; }

int pam_kernel_table_size(const pam_kernel_table* table, int* n_grid, int* n_max) {
    PAM_CHECK_ARGS(table && n_grid && n_max);
    *n_grid = table->core.n_grid;
    *n_max = table->core.n_max;
    return PAM_OK;
}

int pam_kernel_table_row(const pam_kernel_table* table, int index, double* t, double* k,
                         double* h_values) {
    PAM_CHECK_ARGS(table && t && k && h_values);
    if (index < 0 || index >= table->core.n_grid)
        return fail(PAM_ERR_INVALID_ARGUMENT, "kernel table row index out of range");
    *t = table->core.times[index];
    *k = table->core.k_values[index];
    for (int n = 1; n <= table->core.n_max; ++n) h_values[n - 1] = table->core.h_values[n][index];
    return PAM_OK;
}

int pam_kernel_table_write_csv(const pam_kernel_table* table, const char* path,
                               int include_selftest) {
    PAM_CHECK_ARGS(table && path);
    return guarded([&]() -> int {
        std::string csv = pam::kernel_table_csv(table->core, include_selftest != 0);
        std::ofstream out(path, std::ios::binary);
        if (!out) return fail(PAM_ERR_IO, "cannot open CSV output file");
        out << csv;
        if (!out) return fail(PAM_ERR_IO, "CSV write failed");
        return PAM_OK;
    });
}

int pam_moment_series(const pam_model* model, double t, double weight, double tol,
                      double* value, int* truncation_index) {
    PAM_CHECK_ARGS(model && value);
    return guarded([&] {
        auto sv = pam::moment_series(model->core.spatial, t, weight, tol);
        *value = sv.value;
        if (truncation_index) *truncation_index = sv.truncation_index;
        return PAM_OK;
    });
}

int pam_moment_series_sqrt(const pam_model* model, double t, double weight, double tol,
                           double* value, int* truncation_index) {
    PAM_CHECK_ARGS(model && value);
    return guarded([&] {
        auto sv = pam::moment_series_sqrt(model->core.spatial, t, weight, tol);
        *value = sv.value;
        if (truncation_index) *truncation_index = sv.truncation_index;
        return PAM_OK;
    });
}

int pam_chaos1_second_moment(const pam_model* model, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::chaos1_second_moment(model->core, t);
        return PAM_OK;
    });
}

int pam_chaos1_time_increment(const pam_model* model, double t0, double t1, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::chaos1_time_increment_moment(model->core, t0, t1);
        return PAM_OK;
    });
}

int pam_chaos1_space_increment(const pam_model* model, double t, const double* z, int z_len,
                               double* out) {
    PAM_CHECK_ARGS(model && out && z);
    return guarded([&] {
        *out = pam::chaos1_space_increment_moment(model->core,
                                                  t, std::span<const double>(z, z_len));
        return PAM_OK;
    });
}

int pam_chaos2_second_moment_qmc(const pam_model* model, double t, uint64_t seed,
                                 int log2_points, int shifts, double* value,
                                 double* std_error) {
    PAM_CHECK_ARGS(model && value && std_error);
    if (model->core.spatial.dimension != 1)
        return fail(PAM_ERR_UNSUPPORTED, "exact second-order chaos moments require d = 1");
    return guarded([&] {
        auto est = pam::chaos2_second_moment_qmc(model->core, t, seed, log2_points, shifts);
        *value = est.value;
        *std_error = est.std_error;
        return PAM_OK;
    });
}

int pam_chaos_moment_bound(const pam_model* model, int order, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::chaos_moment_bound(model->core, order, t);
        return PAM_OK;
    });
}

int pam_solution_second_moment_bound(const pam_model* model, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::solution_second_moment_bound(model->core, t);
        return PAM_OK;
    });
}

int pam_solution_p_moment_bound(const pam_model* model, double t, double p, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::solution_p_moment_bound(model->core, t, p);
        return PAM_OK;
    });
}

int pam_chaos1_increment_bound_overlap(const pam_model* model, double t, double h, double eta,
                                       double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::chaos1_increment_bound_overlap(model->core, t, h, eta);
        return PAM_OK;
    });
}

int pam_chaos1_increment_bound_fresh(const pam_model* model, double t, double h, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::chaos1_increment_bound_fresh(model->core, t, h);
        return PAM_OK;
    });
}

int pam_holder_constants(const pam_model* model, double horizon, double p, double eta,
                         double out_constants[3]) {
    PAM_CHECK_ARGS(model && out_constants);
    return guarded([&] {
        auto consts = pam::holder_constants(model->core, horizon, p, eta);
        out_constants[0] = consts.time_overlap;
        out_constants[1] = consts.time_fresh;
        out_constants[2] = consts.space;
        return PAM_OK;
    });
}

int pam_noise_basis_build(const pam_model* model, double horizon, double domain_length,
                          int temporal_rank, int mode_count, int time_cells,
                          pam_noise_basis** out) {
    PAM_CHECK_ARGS(model && out);
    *out = nullptr;
    return guarded([&] {
        auto basis = pam::build_noise_basis(model->core, horizon, domain_length, temporal_rank,
                                            mode_count, time_cells);
        *out = new pam_noise_basis{std::move(basis)};
        return PAM_OK;
    });
}

void pam_noise_basis_free(pam_noise_basis* basis) { delete basis; }

int pam_noise_basis_info(const pam_noise_basis* basis, int* temporal_rank, int* mode_count,
                         int* time_cells, double* cov_trace, double* eigen_sum,
                         double* min_eigenvalue, int* clipped_count) {
    PAM_CHECK_ARGS(basis);
    if (temporal_rank) *temporal_rank = basis->core.temporal_rank;
    if (mode_count) *mode_count = basis->core.mode_count;
    if (time_cells) *time_cells = basis->core.time_cells;
    if (cov_trace) *cov_trace = basis->core.cov_trace;
    if (eigen_sum) *eigen_sum = basis->core.eigen_sum;
    if (min_eigenvalue) *min_eigenvalue = basis->core.min_eigenvalue;
    if (clipped_count) *clipped_count = basis->core.clipped_count;
    return PAM_OK;
}

int pam_noise_basis_eigenvalue(const pam_noise_basis* basis, int index, double* out) {
    PAM_CHECK_ARGS(basis && out);
    if (index < 0 || index >= basis->core.temporal_rank)
        return fail(PAM_ERR_INVALID_ARGUMENT, "eigenvalue index out of range");
    *out = basis->core.eigenvalues[index];
    return PAM_OK;
}

int pam_basis_var_j1(const pam_noise_basis* basis, double t, double* out) {
    PAM_CHECK_ARGS(basis && out);
    return guarded([&] {
        *out = pam::basis_var_j1(basis->core, t);
        return PAM_OK;
    });
}

int pam_lattice_var_j1(const pam_model* model, double horizon, double domain_length,
                       int time_cells, double t, double* out) {
    PAM_CHECK_ARGS(model && out);
    return guarded([&] {
        *out = pam::lattice_var_j1(model->core, horizon, domain_length, time_cells, t);
        return PAM_OK;
    });
}

int pam_simulate(const pam_noise_basis* basis, const pam_sim_options* opts,
                 const double* points, int n_points, pam_point_stats* stats, double* samples) {
    PAM_CHECK_ARGS(basis && opts && points && stats);
    if (n_points < 1) return fail(PAM_ERR_INVALID_ARGUMENT, "need at least one point");
    return guarded([&] {
        pam::SimConfig config;
        config.master_seed = opts->master_seed;
        config.replicates = opts->replicates;
        config.chaos_order = opts->chaos_order;
        config.workers = opts->workers;
        config.memory_budget_mb = opts->memory_budget_mb;
        config.points.resize(n_points);
        for (int i = 0; i < n_points; ++i)
            config.points[i] = pam::SimPoint{points[2 * i], points[2 * i + 1]};
        auto result = pam::simulate_chaos(basis->core, config, samples != nullptr);
        for (int i = 0; i < n_points; ++i) {
            const pam::PointStats& s = result.points[i];
            stats[i] = pam_point_stats{s.t, s.x, s.mean_u, s.mean_u_se, s.var_j1, s.var_j1_se,
                                       s.var_j2, s.var_j2_se, s.cov_j1_j2, s.cov_j1_j2_se,
                                       s.moment2, s.moment2_se, s.moment4, s.moment4_se,
                                       s.exact_var_j1, s.exact_var_j2};
        }
        if (samples)
            std::memcpy(samples, result.samples.data(), result.samples.size() * sizeof(double));
        return PAM_OK;
    });
}

int pam_mc_moment(const double* samples, size_t count, double p, double* estimate,
                  double* std_error) {
    PAM_CHECK_ARGS(samples && estimate && std_error);
    return guarded([&] {
        auto [est, se] = pam::mc_moment(std::span<const double>(samples, count), p);
        *estimate = est;
        *std_error = se;
        return PAM_OK;
    });
}

int pam_verify_shift_maximality(const pam_model* model, double t, const double* shifts,
                                int n_shifts, double* values,
                                pam_shift_maximality_report* report) {
    PAM_CHECK_ARGS(model && shifts && report);
    return guarded([&] {
        auto rep = pam::verify_shift_maximality(model->core.spatial, t,
                                                std::span<const double>(shifts, n_shifts),
                                                model->core.quad);
        if (values)
            for (int i = 0; i < n_shifts; ++i) values[i] = rep.values[i];
        report->t = rep.t;
        report->reference = rep.reference;
        report->max_value = rep.max_value;
        report->max_shift = rep.max_shift;
        report->pass = rep.pass ? 1 : 0;
        return PAM_OK;
    });
}

namespace {

void copy_bound_report(const pam::IncrementBoundReport& rep, pam_increment_bound_report* out) {
    out->t = rep.t;
    out->lag = rep.lag;
    out->eta = rep.eta;
    out->theta = rep.theta;
    out->lhs = rep.lhs;
    out->rhs = rep.rhs;
    out->slack_ratio = rep.slack_ratio;
    out->pass = rep.pass ? 1 : 0;
}

} // namespace

int pam_verify_time_increment_bound(const pam_model* model, double t, double h, double eta,
                                    const double* shifts, int n_shifts,
                                    pam_increment_bound_report* report) {
    PAM_CHECK_ARGS(model && shifts && report);
    return guarded([&] {
        auto rep = pam::verify_time_increment_bound(model->core.spatial, t, h, eta,
                                                    std::span<const double>(shifts, n_shifts),
                                                    model->core.quad);
        copy_bound_report(rep, report);
        return PAM_OK;
    });
}

int pam_verify_space_increment_bound(const pam_model* model, double t, const double* z,
                                     int z_len, double eta, const double* shifts, int n_shifts,
                                     pam_increment_bound_report* report) {
    PAM_CHECK_ARGS(model && z && shifts && report);
    return guarded([&] {
        auto rep = pam::verify_space_increment_bound(
            model->core.spatial, t, std::span<const double>(z, z_len), eta,
            std::span<const double>(shifts, n_shifts), model->core.quad);
        copy_bound_report(rep, report);
        return PAM_OK;
    });
}

int pam_fuzz_scalar_inequalities(uint64_t samples, uint64_t seed,
                                 pam_inequality_entry* entries, int* n_entries, int* pass) {
    PAM_CHECK_ARGS(entries && n_entries && pass);
    return guarded([&] {
        auto rep = pam::fuzz_scalar_inequalities(samples, seed);
        *n_entries = static_cast<int>(rep.entries.size());
        for (size_t i = 0; i < rep.entries.size(); ++i) {
            const auto& e = rep.entries[i];
            std::snprintf(entries[i].name, sizeof(entries[i].name), "%s", e.name.c_str());
            entries[i].violations = e.violations;
            entries[i].worst_slack = e.worst_slack;
            entries[i].asserted = e.asserted ? 1 : 0;
        }
        *pass = rep.pass ? 1 : 0;
        return PAM_OK;
    });
}

int pam_fit_increment_exponent(const pam_model* model, int direction, double base_time,
                               const double* lags, int n_lags, double margin,
                               double proximity_tol, double* moments,
                               pam_regularity_fit* fit) {
    PAM_CHECK_ARGS(model && lags && fit);
    if (direction != 0 && direction != 1)
        return fail(PAM_ERR_INVALID_ARGUMENT, "direction must be 0 (time) or 1 (space)");
    return guarded([&] {
        auto rep = pam::fit_increment_exponent(
            model->core,
            direction == 0 ? pam::IncrementDirection::time : pam::IncrementDirection::space,
            base_time, std::span<const double>(lags, n_lags), margin, proximity_tol);
        if (moments)
            for (int i = 0; i < n_lags; ++i) moments[i] = rep.moments[i];
        fit->direction = direction;
        fit->base_time = rep.base_time;
        fit->theory_exponent = rep.theory_exponent;
        fit->slope = rep.slope;
        fit->intercept = rep.intercept;
        fit->rms_residual = rep.rms_residual;
        fit->pass_lower = rep.pass_lower ? 1 : 0;
        fit->proximity_ok = rep.proximity_ok ? 1 : 0;
        return PAM_OK;
    });
}

} // extern "C"
