#include <doctest.h>

#include <cmath>

#include "pam/noise.hpp"
#include "pam/quadrature.hpp"
#include "support/oracles.hpp"

using namespace pam;

namespace {
const NoiseModel kModel = NoiseModel::create(1, 0.5, 0.5);
}

TEST_CASE("covariance cell averages match a dense double integral") {
    // Adjacent unit cells and the singular diagonal cell, beta = 0.5.
    const double beta = 0.5;
    QuadratureSpec quad;
    quad.abs_tol = 1e-13;
    auto dense = [&](double x1, double x2, double y1, double y2) {
        return integrate_adaptive(
            [&](double r) {
                return integrate_adaptive(
                    [&](double s) { return std::pow(std::abs(r - s), -beta); }, y1, y2, quad);
            },
            x1, x2, quad);
    };
    double adj = oracles::gamma_rect_mass(1.0, 2.0, 0.0, 1.0, beta);
    CHECK(adj == doctest::Approx(dense(1.0, 2.0, 0.0, 1.0)).epsilon(1e-8));
    // Diagonal cell: compare against the closed form 2 G2(1).
    double diag = oracles::gamma_rect_mass(0.0, 1.0, 0.0, 1.0, beta);
    CHECK(diag == doctest::Approx(2.0 / (0.5 * 1.5)).epsilon(1e-12));
}

TEST_CASE("noise basis spectral structure") {
    auto basis = build_noise_basis(kModel, 1.0, 16.0, 24, 32, 128);
    CHECK(basis.min_eigenvalue >= -1e-10 * basis.cov_trace);
    CHECK(std::abs(basis.eigen_sum / basis.cov_trace - 1.0) < 1e-6);  // Parseval/trace
    for (int j = 1; j < basis.temporal_rank; ++j) {
        CHECK(basis.eigenvalues[j] <= basis.eigenvalues[j - 1]);
        CHECK(basis.eigenvalues[j] >= 0.0);
    }
    // Discrete orthonormality of the scaled eigenvectors.
    const int n = basis.time_cells;
    const double dt = basis.horizon / n;
    for (int j = 0; j < 4; ++j) {
        for (int k = j; k < 4; ++k) {
            double dot = 0.0;
            for (int c = 0; c < n; ++c)
                dot += basis.eigenvectors[j * n + c] * basis.eigenvectors[k * n + c] * dt;
            CHECK(dot == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-9));
        }
    }
    // Mode weights: positive, and the zero cell is its own mirror half.
    CHECK(basis.mode_weight[0] ==
          doctest::Approx(2.0 * std::pow(M_PI / 16.0, 0.5) / 0.5).epsilon(1e-13));
    for (double w : basis.mode_weight) CHECK(w > 0.0);
    CHECK_THROWS_AS(build_noise_basis(kModel, 1.0, 16.0, 0, 32, 128), std::invalid_argument);
    CHECK_THROWS_AS(build_noise_basis(kModel, 1.0, 16.0, 256, 32, 128), std::invalid_argument);
    auto model2 = NoiseModel::create(2, 1.2, 0.5);
    CHECK_THROWS_AS(build_noise_basis(model2, 1.0, 16.0, 8, 8, 64), std::invalid_argument);
}

TEST_CASE("truncated variance: refinement monotone, bounded, deficit halves") {
    const double t = 0.5;
    auto b1 = build_noise_basis(kModel, 1.0, 16.0, 16, 32, 256);
    auto b2 = build_noise_basis(kModel, 1.0, 16.0, 32, 64, 256);
    auto b3 = build_noise_basis(kModel, 1.0, 16.0, 64, 128, 256);
    double v1 = basis_var_j1(b1, t), v2 = basis_var_j1(b2, t), v3 = basis_var_j1(b3, t);
    double vfull = lattice_var_j1(kModel, 1.0, 16.0, 256, t);
    double alpha1 = chaos1_second_moment(kModel, t);
    CHECK(v1 <= v2);
    CHECK(v2 <= v3);
    CHECK(v3 <= vfull * (1.0 + 1e-12));
    CHECK(std::abs(vfull / alpha1 - 1.0) < 0.01);  // lattice bias under 1%
    CHECK(v3 <= alpha1 * (1.0 + 1e-9));
    double d2 = vfull - v2, d3 = vfull - v3;
    CHECK(d2 >= 0.0);
    CHECK(d3 >= 0.0);
    CHECK(d3 <= 0.5 * d2);  // deficit at least halves under (J,M) doubling
}

TEST_CASE("periodization control: doubling the domain moves the variance < 1%") {
    double v16 = lattice_var_j1(kModel, 1.0, 16.0, 128, 0.5);
    double v32 = lattice_var_j1(kModel, 1.0, 32.0, 128, 0.5);
    CHECK(std::abs(v32 / v16 - 1.0) < 0.01);
}

TEST_CASE("wick coefficients agree with a brute-force ordered double integral") {
    auto basis = build_noise_basis(kModel, 1.0, 8.0, 2, 2, 16);
    const double t = 0.75, x = 0.4;
    WickCoefficients wick = wick_coefficients(basis, t, x);
    const int nch = basis.channels();
    REQUIRE(wick.basis_size == basis.temporal_rank * nch);

    // Brute force: fine midpoint quadrature over {0 < s1 < s2 < t} of
    //   e_j(s1) exp(-(s2-s1) xi_a^2/2) e_j'(s2) exp(-(t-s2) xi_q^2/2)
    // at the combined frequencies, symmetrized.  The fine grid is aligned
    // with the piecewise-constant eigenvector cells and the triangular
    // boundary slice is integrated with its partial width, so the only error
    // is the O(h^2) midpoint error of the exponentials.
    const int n = basis.time_cells;
    const double dt = basis.horizon / n;
    const double fine = dt / 32.0;
    auto e_at = [&](int j, double s) {
        int c = std::min(static_cast<int>(s / dt), n - 1);
        return basis.eigenvectors[j * n + c];
    };
    auto ordered_k = [&](int ja, int ma, bool sa, int jb, int mb, bool sb) {
        double xi_a = basis.mode_freq[ma];
        int qm = std::abs(mb - ma), qp = ma + mb;
        double sg = (mb > ma) ? 1.0 : (mb < ma ? -1.0 : 0.0);
        double xim = 2.0 * M_PI * qm / basis.domain_length;
        double xip = 2.0 * M_PI * qp / basis.domain_length;
        auto inner_integral = [&](double s2) {
            double acc = 0.0;
            int n_full = static_cast<int>(s2 / fine);
            for (int i = 0; i < n_full; ++i) {
                double s1 = (i + 0.5) * fine;
                acc += e_at(ja, s1) * std::exp(-0.5 * (s2 - s1) * xi_a * xi_a) * fine;
            }
            double rest = s2 - n_full * fine;
            if (rest > 0.0) {
                double s1 = n_full * fine + 0.5 * rest;
                acc += e_at(ja, s1) * std::exp(-0.5 * (s2 - s1) * xi_a * xi_a) * rest;
            }
            return acc;
        };
        double accm = 0.0, accp = 0.0;
        const int steps = static_cast<int>(std::round(t / fine));
        for (int i2 = 0; i2 < steps; ++i2) {
            double s2 = (i2 + 0.5) * fine;
            double inner = inner_integral(s2);
            accm += e_at(jb, s2) * std::exp(-0.5 * (t - s2) * xim * xim) * inner * fine;
            accp += e_at(jb, s2) * std::exp(-0.5 * (t - s2) * xip * xip) * inner * fine;
        }
        double tm = accm, tp = accp;
        if (!sa && !sb) return 0.5 * (tm * std::cos(xim * x) + tp * std::cos(xip * x));
        if (sa && sb) return 0.5 * (tm * std::cos(xim * x) - tp * std::cos(xip * x));
        if (!sa && sb) return 0.5 * (tp * std::sin(xip * x) + sg * tm * std::sin(xim * x));
        return 0.5 * (tp * std::sin(xip * x) - sg * tm * std::sin(xim * x));
    };

    auto channel = [&](int ch) {
        struct {
            int m;
            bool is_sin;
        } r{(ch + 1) / 2, ch >= 1 && ch % 2 == 0};
        return r;
    };
    int checked = 0;
    for (int a = 0; a < wick.basis_size && checked < 12; a += 2) {
        for (int b = a; b < wick.basis_size && checked < 12; b += 3) {
            int ja = a / nch, jb = b / nch;
            auto ca = channel(a % nch), cb = channel(b % nch);
            double amp_a = std::sqrt(basis.eigenvalues[ja] * basis.mode_weight[ca.m]);
            double amp_b = std::sqrt(basis.eigenvalues[jb] * basis.mode_weight[cb.m]);
            double ref = 0.5 * amp_a * amp_b *
                         (ordered_k(ja, ca.m, ca.is_sin, jb, cb.m, cb.is_sin) +
                          ordered_k(jb, cb.m, cb.is_sin, ja, ca.m, ca.is_sin));
            double got = wick.coef[static_cast<size_t>(a) * wick.basis_size + b];
            CHECK(got == doctest::Approx(ref).epsilon(5e-4));
            ++checked;
        }
    }
    REQUIRE(checked == 12);
}

TEST_CASE("sampling statistics match the exact truncated moments") {
    auto basis = build_noise_basis(kModel, 1.0, 16.0, 16, 24, 128);
    SimConfig config;
    config.master_seed = 424242;
    config.replicates = 6000;
    config.chaos_order = 2;
    config.workers = 2;
    config.points = {{0.5, 0.3}, {1.0, 11.0}};
    SimResult result = simulate_chaos(basis, config, false);
    for (const PointStats& s : result.points) {
        CHECK(std::abs(s.mean_u - 1.0) <= 4.0 * s.mean_u_se);          // E[u] = 1
        CHECK(std::abs(s.var_j1 - s.exact_var_j1) <= 4.0 * s.var_j1_se);
        CHECK(std::abs(s.var_j2 - s.exact_var_j2) <= 5.0 * s.var_j2_se);
        CHECK(std::abs(s.cov_j1_j2) <= 4.0 * s.cov_j1_j2_se);          // chaos orthogonality
        double decomposition = 1.0 + s.var_j1 + s.var_j2;
        CHECK(std::abs(s.moment2 - decomposition) <=
              4.0 * (s.moment2_se + s.var_j1_se + s.var_j2_se) + 4.0 * s.mean_u_se);
    }
    // Stationarity: x-independence of the exact variance.
    CHECK(result.points[0].exact_var_j1 ==
          doctest::Approx(basis_var_j1(basis, 0.5)).epsilon(1e-12));
}

TEST_CASE("simulation determinism across worker counts") {
    auto basis = build_noise_basis(kModel, 1.0, 16.0, 12, 16, 64);
    SimConfig config;
    config.master_seed = 31337;
    config.replicates = 500;
    config.chaos_order = 2;
    config.points = {{0.5, 0.3}};
    config.workers = 1;
    SimResult a = simulate_chaos(basis, config, true);
    config.workers = 3;
    SimResult b = simulate_chaos(basis, config, true);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
    CHECK(a.points[0].moment2 == b.points[0].moment2);
}

TEST_CASE("simulation guards") {
    auto basis = build_noise_basis(kModel, 1.0, 16.0, 12, 16, 64);
    SimConfig config;
    config.points = {{0.5, 0.3}};
    config.replicates = 0;
    CHECK_THROWS_AS(simulate_chaos(basis, config, false), std::invalid_argument);
    config.replicates = 10;
    config.chaos_order = 3;
    CHECK_THROWS_AS(simulate_chaos(basis, config, false), std::invalid_argument);
    config.chaos_order = 2;
    config.points = {{2.0, 0.3}};
    CHECK_THROWS_AS(simulate_chaos(basis, config, false), std::invalid_argument);
    config.points = {{0.5, 0.3}};
    config.memory_budget_mb = 0.001;
    CHECK_THROWS_WITH_AS(simulate_chaos(basis, config, false),
                         doctest::Contains("memory budget"), std::invalid_argument);
}

TEST_CASE("mc_moment basics") {
    std::vector<double> ones(100, 1.0);
    auto [est, se] = mc_moment(ones, 2.0);
    CHECK(est == doctest::Approx(1.0));
    CHECK(se == doctest::Approx(0.0));
    CHECK_THROWS_AS(mc_moment(ones, 3.0), std::invalid_argument);
}
