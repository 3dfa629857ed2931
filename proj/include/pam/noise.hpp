#ifndef PAM_NOISE_HPP
#define PAM_NOISE_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pam/chaos.hpp"

namespace pam {

/// Finite-rank synthesis of the space-time noise on [0,T] x [0,L]:
/// temporal Karhunen-Loeve eigenpairs of the cell-averaged covariance
/// operator (Nystrom, closed-form cell integrals of |w|^(-beta)) crossed with
/// a cosine/sine frequency lattice xi_m = 2 pi m / L whose weights are the
/// exact spectral-density cell masses (the m = 0 cell is its own mirror).
struct NoiseBasis {
    NoiseModel model;
    double horizon = 1.0;
    double domain_length = 16.0;
    int temporal_rank = 32;   // J
    int mode_count = 64;      // M
    int time_cells = 256;

    std::vector<double> eigenvalues;    // lambda_j, descending, operator scale
    std::vector<double> eigenvectors;   // e_j on cells, [j * time_cells + c], L2-orthonormal
    std::vector<double> mode_freq;      // xi_m, m = 0..M
    std::vector<double> mode_weight;    // w_m
    double cov_trace = 0.0;             // trace of the discretized operator
    double eigen_sum = 0.0;             // sum of all eigenvalues before truncation
    double min_eigenvalue = 0.0;        // smallest eigenvalue before clipping
    int clipped_count = 0;

    int channels() const { return 2 * mode_count + 1; }  // cos_0, cos_m, sin_m
    int basis_size() const { return temporal_rank * channels(); }
};

NoiseBasis build_noise_basis(const NoiseModel& model, double horizon, double domain_length,
                             int temporal_rank, int mode_count, int time_cells);

/// Exact variance of the truncated J_1 at time t (x-independent).
double basis_var_j1(const NoiseBasis& basis, double t);

/// Full-rank, full-band variance on the same lattice and time discretization;
/// the recorded truncation deficit is this value minus basis_var_j1, which is
/// nonnegative by construction and shrinks as (J, M) grow.
double lattice_var_j1(const NoiseModel& model, double horizon, double domain_length,
                      int time_cells, double t);

struct SimPoint {
    double t = 0.5;
    double x = 0.0;
};

struct SimConfig {
    std::uint64_t master_seed = 1;
    int replicates = 1000;
    int chaos_order = 2;  // 1 or 2
    int workers = 1;
    double memory_budget_mb = 512.0;
    std::vector<SimPoint> points;
};

struct PointStats {
    double t = 0.0, x = 0.0;
    double mean_u = 0.0, mean_u_se = 0.0;
    double var_j1 = 0.0, var_j1_se = 0.0;
    double var_j2 = 0.0, var_j2_se = 0.0;
    double cov_j1_j2 = 0.0, cov_j1_j2_se = 0.0;
    double moment2 = 0.0, moment2_se = 0.0;
    double moment4 = 0.0, moment4_se = 0.0;
    double exact_var_j1 = 0.0;  // from the basis coefficients
    double exact_var_j2 = 0.0;  // 2 ||c~||_F^2 from the Wick coefficients
};

struct SimResult {
    std::vector<PointStats> points;
    /// Optional per-replicate u values, point-major: u[point * replicates + r].
    std::vector<double> samples;
};

/// Monte Carlo sampling of u_N = 1 + J_1 (+ J_2).  Deterministic for a given
/// master seed regardless of worker count (counter-based normals).
SimResult simulate_chaos(const NoiseBasis& basis, const SimConfig& config,
                         bool keep_samples = false);

/// Dense symmetrized second-chaos Wick coefficient matrix at one evaluation
/// point; the sampler consumes exactly this table, so Var[J_2] = 2 ||c~||_F^2.
struct WickCoefficients {
    int basis_size = 0;
    std::vector<double> coef;  // row-major, symmetric
    double trace = 0.0;
    double frobenius_sq = 0.0;
};
WickCoefficients wick_coefficients(const NoiseBasis& basis, double t, double x,
                                   double memory_budget_mb = 512.0);

/// Empirical p-th moment (p in {2,4}) with jackknife standard error.
std::pair<double, double> mc_moment(std::span<const double> samples, double p);

} // namespace pam

#endif
