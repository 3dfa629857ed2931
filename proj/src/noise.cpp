#include "pam/noise.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <thread>

#include "pam/rng.hpp"

namespace pam {

namespace {

// Closed-form double integral of |r-s|^(-beta) over [x1,x2] x [y1,y2] via the
// even second antiderivative G2(w) = |w|^(2-beta) / ((1-beta)(2-beta)).
double cov_cell_integral(double x1, double x2, double y1, double y2, double beta) {
    auto g2 = [beta](double w) {
        return std::pow(std::abs(w), 2.0 - beta) / ((1.0 - beta) * (2.0 - beta));
    };
    return g2(x2 - y1) + g2(x1 - y2) - g2(x1 - y1) - g2(x2 - y2);
}

std::vector<double> build_cov_matrix(const TemporalCovariance& temporal, double horizon,
                                     int n_cells) {
    const double dt = horizon / n_cells;
    std::vector<double> cov(static_cast<size_t>(n_cells) * n_cells);
    for (int a = 0; a < n_cells; ++a) {
        for (int b = 0; b <= a; ++b) {
            double v = cov_cell_integral(a * dt, (a + 1) * dt, b * dt, (b + 1) * dt,
                                         temporal.beta) /
                       (dt * dt);
            cov[a * n_cells + b] = v;
            cov[b * n_cells + a] = v;
        }
    }
    return cov;
}

// Spectral-density mass of the frequency cell around xi_m (both signs).
std::vector<double> build_mode_weights(const SpatialSpectralModel& spatial, double L, int M,
                                       std::vector<double>* freqs) {
    const double alpha = spatial.alpha;
    const double half = M_PI / L;
    std::vector<double> w(M + 1);
    freqs->resize(M + 1);
    for (int m = 0; m <= M; ++m) {
        (*freqs)[m] = 2.0 * M_PI * m / L;
        if (m == 0) {
            w[0] = 2.0 * std::pow(half, alpha) / alpha;
        } else {
            double lo = (*freqs)[m] - half, hi = (*freqs)[m] + half;
            w[m] = 2.0 * (std::pow(hi, alpha) - std::pow(lo, alpha)) / alpha;
        }
    }
    return w;
}

// \int_0^h exp(-b(t - u0 - v)) exp(-a v) dv with all exponents <= 0;
// stable for a ~ b.
double exp_cross_integral(double b, double a, double t, double u0, double h) {
    double x = (b - a) * h;
    if (std::abs(x) < 1e-8) {
        return std::exp(-b * (t - u0)) * h * (1.0 + 0.5 * x + x * x / 6.0);
    }
    double hi = std::exp(-b * (t - u0 - h) - a * h);
    double lo = std::exp(-b * (t - u0));
    return (hi - lo) * h / x;
}

// \int_0^h exp(-b(t - u0 - v)) v dv.
double exp_linear_integral(double b, double t, double u0, double h) {
    double x = b * h;
    if (x < 1e-4) {
        return std::exp(-b * (t - u0)) * h * h * (0.5 + x / 3.0 + x * x / 8.0);
    }
    double hi = std::exp(-b * (t - u0 - h));
    double lo = std::exp(-b * (t - u0));
    return (hi * (x - 1.0) + lo) / (b * b);
}

// Kernel-leg integrals over one time cell intersected with [0,t]:
//   \int_cell exp(-(t-s) xi^2 / 2) ds.
double propagator_cell_integral(double xi, double t, double u0, double u1) {
    double b = 0.5 * xi * xi;
    return exp_cross_integral(b, 0.0, t, u0, u1 - u0);
}

} // namespace

NoiseBasis build_noise_basis(const NoiseModel& model, double horizon, double domain_length,
                             int temporal_rank, int mode_count, int time_cells) {
    require(model.spatial.dimension == 1, "build_noise_basis: simulation supports d = 1 only");
    require(horizon > 0.0, "build_noise_basis: horizon must be > 0");
    require(domain_length > 0.0, "build_noise_basis: domain length must be > 0");
    require(temporal_rank >= 1 && mode_count >= 1, "build_noise_basis: J, M must be >= 1");
    require(time_cells >= 8, "build_noise_basis: time_cells must be >= 8");
    require(temporal_rank <= time_cells,
            "build_noise_basis: temporal rank cannot exceed the number of time cells");

    NoiseBasis basis;
    basis.model = model;
    basis.horizon = horizon;
    basis.domain_length = domain_length;
    basis.temporal_rank = temporal_rank;
    basis.mode_count = mode_count;
    basis.time_cells = time_cells;

    const int n = time_cells;
    const double dt = horizon / n;
    std::vector<double> cov = build_cov_matrix(model.temporal, horizon, n);

    Eigen::MatrixXd op(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) op(a, b) = cov[a * n + b] * dt;
    basis.cov_trace = op.trace();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op);
    if (solver.info() != Eigen::Success)
        throw NumericalError("build_noise_basis: eigendecomposition failed");

    basis.min_eigenvalue = solver.eigenvalues().minCoeff();
    if (basis.min_eigenvalue < -1e-10 * basis.cov_trace)
        throw NumericalError(
            "build_noise_basis: covariance discretization is not positive semidefinite");

    basis.eigen_sum = solver.eigenvalues().sum();
    basis.eigenvalues.resize(temporal_rank);
    basis.eigenvectors.assign(static_cast<size_t>(temporal_rank) * n, 0.0);
    const double scale = 1.0 / std::sqrt(dt);
    for (int j = 0; j < temporal_rank; ++j) {
        int src = n - 1 - j;  // solver sorts ascending
        double lam = solver.eigenvalues()(src);
        if (lam < 0.0) {
            lam = 0.0;
            ++basis.clipped_count;
        }
        basis.eigenvalues[j] = lam;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        int imax = 0;
        for (int c = 1; c < n; ++c)
            if (std::abs(v(c)) > std::abs(v(imax))) imax = c;
        if (v(imax) < 0.0) v = -v;
        for (int c = 0; c < n; ++c) basis.eigenvectors[j * n + c] = v(c) * scale;
    }

    basis.mode_weight =
        build_mode_weights(model.spatial, domain_length, mode_count, &basis.mode_freq);
    return basis;
}

namespace {

// q_{j,m}(t) = \int_0^t exp(-(t-s) xi_m^2 / 2) e_j(s) ds, exact for the
// piecewise-constant eigenvectors; [m * J + j] layout.
std::vector<double> basis_q_factors(const NoiseBasis& basis, double t) {
    const int J = basis.temporal_rank;
    const int n = basis.time_cells;
    const double dt = basis.horizon / n;
    std::vector<double> q(static_cast<size_t>(basis.mode_count + 1) * J, 0.0);
    for (int m = 0; m <= basis.mode_count; ++m) {
        double xi = basis.mode_freq[m];
        for (int j = 0; j < J; ++j) {
            const double* e = &basis.eigenvectors[j * n];
            double acc = 0.0;
            for (int c = 0; c < n; ++c) {
                double u0 = c * dt;
                if (u0 >= t) break;
                double u1 = std::min(u0 + dt, t);
                acc += e[c] * propagator_cell_integral(xi, t, u0, u1);
            }
            q[m * J + j] = acc;
        }
    }
    return q;
}

} // namespace

double basis_var_j1(const NoiseBasis& basis, double t) {
    require(t > 0.0 && t <= basis.horizon, "basis_var_j1: t must lie in (0, horizon]");
    std::vector<double> q = basis_q_factors(basis, t);
    const int J = basis.temporal_rank;
    double var = 0.0;
    for (int m = 0; m <= basis.mode_count; ++m) {
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            double qv = q[m * J + j];
            acc += basis.eigenvalues[j] * qv * qv;
        }
        var += basis.mode_weight[m] * acc;
    }
    return var;
}

double lattice_var_j1(const NoiseModel& model, double horizon, double domain_length,
                      int time_cells, double t) {
    require(model.spatial.dimension == 1, "lattice_var_j1: d = 1 only");
    require(t > 0.0 && t <= horizon, "lattice_var_j1: t must lie in (0, horizon]");
    const int n = time_cells;
    const double dt = horizon / n;
    std::vector<double> cov = build_cov_matrix(model.temporal, horizon, n);
    const double alpha = model.spatial.alpha;
    const double half = M_PI / domain_length;

    std::vector<double> kappa(n);
    double total = 0.0;
    int quiet = 0;
    for (int m = 0; m <= 1 << 20; ++m) {
        double xi = 2.0 * M_PI * m / domain_length;
        double w = (m == 0) ? 2.0 * std::pow(half, alpha) / alpha
                            : 2.0 * (std::pow(xi + half, alpha) - std::pow(xi - half, alpha)) /
                                  alpha;
        for (int c = 0; c < n; ++c) {
            double u0 = c * dt;
            kappa[c] = (u0 >= t) ? 0.0
                                 : propagator_cell_integral(xi, t, u0, std::min(u0 + dt, t));
        }
        // kappa' C kappa with the cell covariance (operator scale carries dt
        // through the eigen identity, already folded into cov * dt elsewhere;
        // here the quadratic form uses the raw cell averages).
        double quad = 0.0;
        for (int a = 0; a < n; ++a) {
            double row = 0.0;
            const double* cr = &cov[static_cast<size_t>(a) * n];
            for (int b = 0; b < n; ++b) row += cr[b] * kappa[b];
            quad += kappa[a] * row;
        }
        double term = w * quad;
        total += term;
        if (m > 16 && term < 1e-13 * total) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Wick coefficients for the truncated second chaos at one evaluation point.
// ---------------------------------------------------------------------------

namespace {

// Basis index layout: a = j * channels + ch with ch = 0 for cos_0 and then
// (cos_m, sin_m) pairs: ch = 2m-1, 2m for m >= 1.
inline int channel_mode(int ch) { return (ch + 1) / 2; }
inline bool channel_is_sin(int ch) { return ch >= 1 && (ch % 2) == 0; }

} // namespace

WickCoefficients wick_coefficients(const NoiseBasis& basis, double t, double x,
                                   double memory_budget_mb) {
    require(t > 0.0 && t <= basis.horizon, "wick_coefficients: t must lie in (0, horizon]");
    const int J = basis.temporal_rank;
    const int M = basis.mode_count;
    const int n = basis.time_cells;
    const int nch = basis.channels();
    const int nb = basis.basis_size();
    const double dt = basis.horizon / n;

    const double t_bytes = 8.0 * J * J * (M + 1) * (2 * M + 1);
    const double c_bytes = 8.0 * static_cast<double>(nb) * nb;
    if (t_bytes + c_bytes > memory_budget_mb * 1e6)
        throw std::invalid_argument(
            "simulate_chaos: second-chaos coefficient tables exceed the memory budget; "
            "reduce the basis dimensions (J, M) or raise the budget");

    const int n_cells_t = static_cast<int>(std::ceil(t / dt - 1e-12));

    // P_edge[(m * J + j) * n_cells_t + c]: inner-leg integral up to the left
    // edge of cell c.
    std::vector<double> p_edge(static_cast<size_t>(M + 1) * J * n_cells_t);
    for (int m = 0; m <= M; ++m) {
        double xi = basis.mode_freq[m];
        double a = 0.5 * xi * xi;
        double decay = std::exp(-a * dt);
        double unit = (a > 0.0) ? (1.0 - decay) / a : dt;
        for (int j = 0; j < J; ++j) {
            const double* e = &basis.eigenvectors[j * n];
            double* row = &p_edge[(static_cast<size_t>(m) * J + j) * n_cells_t];
            double p = 0.0;
            for (int c = 0; c < n_cells_t; ++c) {
                row[c] = p;
                p = p * decay + e[c] * unit;
            }
        }
    }

    // T[j, j', m, q] = ordered double integral with the inner leg at xi_m and
    // the outer leg at xi_q; layout [((m * (2M+1) + q) * J + j) * J + j'].
    std::vector<double> big_t(static_cast<size_t>(M + 1) * (2 * M + 1) * J * J);
    std::vector<double> x1(n_cells_t), w2(n_cells_t), sp(static_cast<size_t>(J) * n_cells_t),
        su(static_cast<size_t>(J) * n_cells_t);
    for (int m = 0; m <= M; ++m) {
        double a = 0.5 * basis.mode_freq[m] * basis.mode_freq[m];
        for (int q = 0; q <= 2 * M; ++q) {
            double xi_q = 2.0 * M_PI * q / basis.domain_length;
            double b = 0.5 * xi_q * xi_q;
            for (int c = 0; c < n_cells_t; ++c) {
                double u0 = c * dt;
                double u1 = std::min(u0 + dt, t);
                double h = u1 - u0;
                x1[c] = exp_cross_integral(b, a, t, u0, h);
                if (a > 0.0) {
                    double x0 = exp_cross_integral(b, 0.0, t, u0, h);
                    w2[c] = (x0 - x1[c]) / a;
                } else {
                    w2[c] = exp_linear_integral(b, t, u0, h);
                }
            }
            for (int j = 0; j < J; ++j) {
                const double* pe = &p_edge[(static_cast<size_t>(m) * J + j) * n_cells_t];
                const double* e = &basis.eigenvectors[j * n];
                double* sp_row = &sp[static_cast<size_t>(j) * n_cells_t];
                double* su_row = &su[static_cast<size_t>(j) * n_cells_t];
                for (int c = 0; c < n_cells_t; ++c) {
                    sp_row[c] = pe[c] * x1[c];
                    su_row[c] = e[c] * w2[c];
                }
            }
            double* t_block = &big_t[(static_cast<size_t>(m) * (2 * M + 1) + q) *
                                     static_cast<size_t>(J) * J];
            std::vector<double> combined(n_cells_t);
            for (int j = 0; j < J; ++j) {
                const double* sp_row = &sp[static_cast<size_t>(j) * n_cells_t];
                const double* su_row = &su[static_cast<size_t>(j) * n_cells_t];
                for (int c = 0; c < n_cells_t; ++c) combined[c] = sp_row[c] + su_row[c];
                for (int jp = 0; jp < J; ++jp) {
                    const double* ep = &basis.eigenvectors[jp * n];
                    double acc = 0.0;
                    for (int c = 0; c < n_cells_t; ++c) acc += combined[c] * ep[c];
                    t_block[static_cast<size_t>(j) * J + jp] = acc;
                }
            }
        }
    }

    // Trig factors at the evaluation point for all combined frequencies.
    std::vector<double> cos_q(2 * M + 1), sin_q(2 * M + 1);
    for (int q = 0; q <= 2 * M; ++q) {
        double xi_q = 2.0 * M_PI * q / basis.domain_length;
        cos_q[q] = std::cos(xi_q * x);
        sin_q[q] = std::sin(xi_q * x);
    }
    std::vector<double> amp(nb);
    for (int a = 0; a < nb; ++a) {
        int j = a / nch, ch = a % nch, m = channel_mode(ch);
        amp[a] = std::sqrt(basis.eigenvalues[j] * basis.mode_weight[m]);
    }

    auto ordered_k = [&](int ja, int ma, bool sa, int jb, int mb, bool sb) {
        // K for (a first leg, b second leg): combined frequencies |mb-ma|, ma+mb.
        int qm = std::abs(mb - ma);
        int qp = ma + mb;
        double sg = (mb > ma) ? 1.0 : (mb < ma ? -1.0 : 0.0);
        const double* tm = &big_t[(static_cast<size_t>(ma) * (2 * M + 1) + qm) *
                                  static_cast<size_t>(J) * J];
        const double* tp = &big_t[(static_cast<size_t>(ma) * (2 * M + 1) + qp) *
                                  static_cast<size_t>(J) * J];
        double t_minus = tm[static_cast<size_t>(ja) * J + jb];
        double t_plus = tp[static_cast<size_t>(ja) * J + jb];
        if (!sa && !sb) return 0.5 * (t_minus * cos_q[qm] + t_plus * cos_q[qp]);
        if (sa && sb) return 0.5 * (t_minus * cos_q[qm] - t_plus * cos_q[qp]);
        if (!sa && sb) return 0.5 * (t_plus * sin_q[qp] + sg * t_minus * sin_q[qm]);
        return 0.5 * (t_plus * sin_q[qp] - sg * t_minus * sin_q[qm]);
    };

    WickCoefficients table;
    table.basis_size = nb;
    table.coef.assign(static_cast<size_t>(nb) * nb, 0.0);
    for (int a = 0; a < nb; ++a) {
        int ja = a / nch, cha = a % nch, ma = channel_mode(cha);
        bool sa = channel_is_sin(cha);
        for (int b = a; b < nb; ++b) {
            int jb = b / nch, chb = b % nch, mb = channel_mode(chb);
            bool sb = channel_is_sin(chb);
            double k_ab = ordered_k(ja, ma, sa, jb, mb, sb);
            double k_ba = ordered_k(jb, mb, sb, ja, ma, sa);
            double v = 0.5 * amp[a] * amp[b] * (k_ab + k_ba);
            table.coef[static_cast<size_t>(a) * nb + b] = v;
            table.coef[static_cast<size_t>(b) * nb + a] = v;
        }
    }
    for (int a = 0; a < nb; ++a) table.trace += table.coef[static_cast<size_t>(a) * nb + a];
    for (double v : table.coef) table.frobenius_sq += v * v;
    return table;
}

namespace {

double jackknife_se_mean(std::span<const double> x) {
    const size_t n = x.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n * (n - 1.0)));
}

// Jackknife standard error of the unbiased sample variance.
double jackknife_se_variance(std::span<const double> x) {
    const size_t n = x.size();
    if (n < 3) return 0.0;
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
        s1 += v;
        s2 += v * v;
    }
    std::vector<double> loo(n);
    for (size_t i = 0; i < n; ++i) {
        double m = (s1 - x[i]) / (n - 1.0);
        loo[i] = (s2 - x[i] * x[i] - (n - 1.0) * m * m) / (n - 2.0);
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    return std::sqrt(ss * (n - 1.0) / n);
}

double sample_variance(std::span<const double> x) {
    const size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / (n - 1.0);
}

} // namespace

SimResult simulate_chaos(const NoiseBasis& basis, const SimConfig& config, bool keep_samples) {
    require(config.replicates >= 1, "simulate_chaos: replicates must be >= 1");
    require(config.chaos_order == 1 || config.chaos_order == 2,
            "simulate_chaos: chaos order must be 1 or 2");
    require(!config.points.empty(), "simulate_chaos: need at least one evaluation point");
    require(config.workers >= 1 && config.workers <= 64,
            "simulate_chaos: workers must lie in [1,64]");
    for (const SimPoint& p : config.points) {
        require(p.t > 0.0 && p.t <= basis.horizon,
                "simulate_chaos: point time outside (0, horizon]");
        require(p.x >= 0.0 && p.x <= basis.domain_length,
                "simulate_chaos: point position outside [0, L]");
    }

    const int nb = basis.basis_size();
    const int nch = basis.channels();
    const int J = basis.temporal_rank;
    const int reps = config.replicates;
    const int n_points = static_cast<int>(config.points.size());

    SimResult result;
    result.points.resize(n_points);
    if (keep_samples) result.samples.assign(static_cast<size_t>(n_points) * reps, 0.0);

    std::vector<double> j1(reps), j2(reps);
    for (int pi = 0; pi < n_points; ++pi) {
        const SimPoint& pt = config.points[pi];
        PointStats& stats = result.points[pi];
        stats.t = pt.t;
        stats.x = pt.x;

        std::vector<double> q = basis_q_factors(basis, pt.t);
        std::vector<double> coef1(nb);
        for (int a = 0; a < nb; ++a) {
            int j = a / nch, ch = a % nch, m = channel_mode(ch);
            double trig = channel_is_sin(ch) ? std::sin(basis.mode_freq[m] * pt.x)
                                             : std::cos(basis.mode_freq[m] * pt.x);
            coef1[a] = std::sqrt(basis.eigenvalues[j] * basis.mode_weight[m]) *
                       q[static_cast<size_t>(m) * J + j] * trig;
        }
        stats.exact_var_j1 = 0.0;
        for (double v : coef1) stats.exact_var_j1 += v * v;

        WickCoefficients wick;
        if (config.chaos_order == 2) {
            wick = wick_coefficients(basis, pt.t, pt.x, config.memory_budget_mb);
            stats.exact_var_j2 = 2.0 * wick.frobenius_sq;
        }

        const int block = 32;
        const int n_blocks = (reps + block - 1) / block;
        auto run_blocks = [&](int blk_begin, int blk_end) {
            std::vector<double> z(static_cast<size_t>(nb) * block);
            std::vector<double> w(static_cast<size_t>(nb) * block);
            for (int blk = blk_begin; blk < blk_end; ++blk) {
                int r0 = blk * block;
                int nr = std::min(block, reps - r0);
                for (int k = 0; k < nb; ++k)
                    for (int r = 0; r < nr; ++r)
                        z[static_cast<size_t>(k) * block + r] =
                            rng::normal(config.master_seed, r0 + r, k);
                for (int r = 0; r < nr; ++r) {
                    double acc = 0.0;
                    for (int k = 0; k < nb; ++k)
                        acc += coef1[k] * z[static_cast<size_t>(k) * block + r];
                    j1[r0 + r] = acc;
                }
                if (config.chaos_order == 2) {
                    std::fill(w.begin(), w.end(), 0.0);
                    for (int i = 0; i < nb; ++i) {
                        const double* row = &wick.coef[static_cast<size_t>(i) * nb];
                        double* wi = &w[static_cast<size_t>(i) * block];
                        for (int k = 0; k < nb; ++k) {
                            double cik = row[k];
                            const double* zk = &z[static_cast<size_t>(k) * block];
                            for (int r = 0; r < nr; ++r) wi[r] += cik * zk[r];
                        }
                    }
                    for (int r = 0; r < nr; ++r) {
                        double acc = 0.0;
                        for (int i = 0; i < nb; ++i)
                            acc += z[static_cast<size_t>(i) * block + r] *
                                   w[static_cast<size_t>(i) * block + r];
                        j2[r0 + r] = acc - wick.trace;
                    }
                }
            }
        };

        int workers = std::min(config.workers, n_blocks);
        if (workers <= 1) {
            run_blocks(0, n_blocks);
        } else {
            std::vector<std::thread> pool;
            int per = (n_blocks + workers - 1) / workers;
            for (int wkr = 0; wkr < workers; ++wkr) {
                int lo = wkr * per, hi = std::min(n_blocks, lo + per);
                if (lo >= hi) break;
                pool.emplace_back(run_blocks, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        std::vector<double> u(reps), u2(reps), u4(reps), cross(reps);
        for (int r = 0; r < reps; ++r) {
            double val = 1.0 + j1[r] + (config.chaos_order == 2 ? j2[r] : 0.0);
            u[r] = val;
            u2[r] = val * val;
            u4[r] = u2[r] * u2[r];
            cross[r] = j1[r] * (config.chaos_order == 2 ? j2[r] : 0.0);
        }
        if (keep_samples)
            std::copy(u.begin(), u.end(), result.samples.begin() + static_cast<size_t>(pi) * reps);

        auto mean_of = [](std::span<const double> v) {
            double m = 0.0;
            for (double s : v) m += s;
            return m / v.size();
        };
        stats.mean_u = mean_of(u);
        stats.mean_u_se = jackknife_se_mean(u);
        stats.var_j1 = sample_variance(j1);
        stats.var_j1_se = jackknife_se_variance(j1);
        if (config.chaos_order == 2) {
            stats.var_j2 = sample_variance(j2);
            stats.var_j2_se = jackknife_se_variance(j2);
            stats.cov_j1_j2 = mean_of(cross);
            stats.cov_j1_j2_se = jackknife_se_mean(cross);
        }
        stats.moment2 = mean_of(u2);
        stats.moment2_se = jackknife_se_mean(u2);
        stats.moment4 = mean_of(u4);
        stats.moment4_se = jackknife_se_mean(u4);
    }
    return result;
}

std::pair<double, double> mc_moment(std::span<const double> samples, double p) {
    require(p == 2.0 || p == 4.0, "mc_moment: p must be 2 or 4");
    require(samples.size() >= 2, "mc_moment: need at least two samples");
    std::vector<double> powered(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        double s2 = samples[i] * samples[i];
        powered[i] = (p == 2.0) ? s2 : s2 * s2;
    }
    double mean = 0.0;
    for (double v : powered) mean += v;
    mean /= powered.size();
    return {mean, jackknife_se_mean(powered)};
}

} // namespace pam
