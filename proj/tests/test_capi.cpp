#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "pam/pam.h"

namespace {

struct Model {
    pam_model* ptr = nullptr;
    Model(int d, double alpha, double beta) {
        REQUIRE(pam_model_create(d, alpha, beta, nullptr, &ptr) == PAM_OK);
    }
    ~Model() { pam_model_free(ptr); }
};

} // namespace

TEST_CASE("model lifecycle and error reporting") {
    pam_model* model = nullptr;
    CHECK(pam_model_create(1, 2.5, 0.5, nullptr, &model) == PAM_ERR_INVALID_ARGUMENT);
    CHECK(model == nullptr);
    CHECK(std::strlen(pam_last_error_message()) > 0);
    CHECK(pam_model_create(1, 0.5, 0.5, nullptr, nullptr) == PAM_ERR_INVALID_ARGUMENT);

    pam_quadrature_options quad;
    pam_quadrature_options_default(&quad);
    CHECK(quad.node_count >= 8);
    quad.abs_tol = 0.0;
    CHECK(pam_model_create(1, 0.5, 0.5, &quad, &model) == PAM_ERR_INVALID_ARGUMENT);

    CHECK(pam_model_create(1, 0.5, 0.5, nullptr, &model) == PAM_OK);
    REQUIRE(model != nullptr);
    pam_model_free(model);
}

TEST_CASE("scalar operations through the C surface") {
    Model model(1, 0.5, 0.5);
    double v = 0.0;
    CHECK(pam_gamma_eval(model.ptr, 4.0, &v) == PAM_OK);
    CHECK(v == doctest::Approx(0.5));
    CHECK(pam_gamma_eval(model.ptr, 0.0, &v) == PAM_OK);
    CHECK(std::isinf(v));
    CHECK(pam_covariance_mass(model.ptr, 1.0, &v) == PAM_OK);
    CHECK(v == doctest::Approx(4.0));
    CHECK(pam_dalang_integral(model.ptr, &v) == PAM_OK);
    CHECK(std::isfinite(v));
    CHECK(pam_minimal_eta(model.ptr, &v) == PAM_OK);
    CHECK(v == doctest::Approx(0.25));
    CHECK(pam_holder_integral(model.ptr, 0.2, &v) == PAM_OK);
    CHECK(std::isinf(v));
    CHECK(pam_propagator_energy(model.ptr, 1.0, &v) == PAM_OK);
    CHECK(v == doctest::Approx(std::tgamma(0.25)));
    double vq = 0.0;
    CHECK(pam_propagator_energy_quadrature(model.ptr, 1.0, &vq) == PAM_OK);
    CHECK(vq == doctest::Approx(v).epsilon(1e-9));
    CHECK(pam_propagator_energy(model.ptr, -1.0, &v) == PAM_ERR_INVALID_ARGUMENT);
    CHECK(pam_weighted_energy_integral(model.ptr, 1.0, 0.9, &v) == PAM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("kernel table and series through the C surface") {
    Model model(1, 0.5, 0.5);
    pam_kernel_table* table = nullptr;
    REQUIRE(pam_kernel_table_build(model.ptr, 4, 1.0, 64, &table) == PAM_OK);
    int n_grid = 0, n_max = 0;
    CHECK(pam_kernel_table_size(table, &n_grid, &n_max) == PAM_OK);
    CHECK(n_grid == 64);
    CHECK(n_max == 4);
    double t = 0.0, k = 0.0;
    std::vector<double> h(n_max);
    CHECK(pam_kernel_table_row(table, 63, &t, &k, h.data()) == PAM_OK);
    CHECK(t == doctest::Approx(1.0));
    double href = 0.0;
    CHECK(pam_convolution_power(model.ptr, 1, 1.0, &href) == PAM_OK);
    CHECK(h[0] == doctest::Approx(href).epsilon(1e-8));
    CHECK(pam_kernel_table_row(table, 64, &t, &k, h.data()) == PAM_ERR_INVALID_ARGUMENT);

    std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                       "/pam_capi_table.csv";
    CHECK(pam_kernel_table_write_csv(table, path.c_str(), 1) == PAM_OK);
    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
    CHECK(std::string(line) == "t,k,h1,h2,h3,h4\n");
    std::fclose(f);
    std::remove(path.c_str());
    pam_kernel_table_free(table);

    double value = 0.0;
    int index = 0;
    CHECK(pam_moment_series(model.ptr, 1.0, 1.0, 1e-12, &value, &index) == PAM_OK);
    CHECK(value > 1.0);
    CHECK(index > 0);
    CHECK(pam_kernel_table_build(model.ptr, 30, 1.0, 64, &table) == PAM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("chaos moments through the C surface") {
    Model model(1, 0.5, 0.5);
    double a1 = 0.0, bound = 0.0;
    CHECK(pam_chaos1_second_moment(model.ptr, 1.0, &a1) == PAM_OK);
    CHECK(pam_chaos_moment_bound(model.ptr, 1, 1.0, &bound) == PAM_OK);
    CHECK(a1 < bound);
    double a2 = 0.0, se = 0.0;
    CHECK(pam_chaos2_second_moment_qmc(model.ptr, 0.5, 7, 12, 8, &a2, &se) == PAM_OK);
    CHECK(a2 > 0.0);
    CHECK(se > 0.0);
    double inc = 0.0;
    CHECK(pam_chaos1_time_increment(model.ptr, 0.5, 0.625, &inc) == PAM_OK);
    CHECK(inc > 0.0);
    double z = 0.125;
    CHECK(pam_chaos1_space_increment(model.ptr, 0.5, &z, 1, &inc) == PAM_OK);
    CHECK(inc > 0.0);
    double consts[3] = {0, 0, 0};
    CHECK(pam_holder_constants(model.ptr, 1.0, 2.0, 0.3, consts) == PAM_OK);
    CHECK(consts[0] > 0.0);
    CHECK(consts[1] > 0.0);
    CHECK(consts[2] > 0.0);

    Model planar(2, 1.2, 0.5);
    CHECK(pam_chaos2_second_moment_qmc(planar.ptr, 0.5, 7, 12, 8, &a2, &se) ==
          PAM_ERR_UNSUPPORTED);
}

TEST_CASE("noise basis and simulation through the C surface") {
    Model model(1, 0.5, 0.5);
    pam_noise_basis* basis = nullptr;
    REQUIRE(pam_noise_basis_build(model.ptr, 1.0, 16.0, 12, 16, 64, &basis) == PAM_OK);
    int rank = 0, modes = 0, cells = 0, clipped = 0;
    double trace = 0.0, eigsum = 0.0, mineig = 0.0;
    CHECK(pam_noise_basis_info(basis, &rank, &modes, &cells, &trace, &eigsum, &mineig,
                               &clipped) == PAM_OK);
    CHECK(rank == 12);
    CHECK(modes == 16);
    CHECK(trace > 0.0);
    double lam0 = 0.0, lam1 = 0.0;
    CHECK(pam_noise_basis_eigenvalue(basis, 0, &lam0) == PAM_OK);
    CHECK(pam_noise_basis_eigenvalue(basis, 1, &lam1) == PAM_OK);
    CHECK(lam0 >= lam1);
    CHECK(pam_noise_basis_eigenvalue(basis, 12, &lam1) == PAM_ERR_INVALID_ARGUMENT);

    double var = 0.0, full = 0.0;
    CHECK(pam_basis_var_j1(basis, 0.5, &var) == PAM_OK);
    CHECK(pam_lattice_var_j1(model.ptr, 1.0, 16.0, 64, 0.5, &full) == PAM_OK);
    CHECK(var <= full * (1.0 + 1e-12));

    pam_sim_options opts{12345, 400, 2, 2, 256.0};
    double points[4] = {0.5, 0.3, 1.0, 2.0};
    pam_point_stats stats[2];
    std::vector<double> samples(2 * 400);
    REQUIRE(pam_simulate(basis, &opts, points, 2, stats, samples.data()) == PAM_OK);
    CHECK(stats[0].t == doctest::Approx(0.5));
    CHECK(std::abs(stats[0].mean_u - 1.0) < 6.0 * stats[0].mean_u_se + 0.2);

    // Determinism across worker counts, through the C boundary.
    pam_sim_options opts1{12345, 400, 2, 1, 256.0};
    std::vector<double> again(2 * 400);
    pam_point_stats stats2[2];
    REQUIRE(pam_simulate(basis, &opts1, points, 2, stats2, again.data()) == PAM_OK);
    CHECK(std::memcmp(samples.data(), again.data(), samples.size() * sizeof(double)) == 0);

    double est = 0.0, ese = 0.0;
    CHECK(pam_mc_moment(samples.data(), 400, 2.0, &est, &ese) == PAM_OK);
    CHECK(est > 0.0);
    pam_noise_basis_free(basis);
}

TEST_CASE("regularity verification through the C surface") {
    Model model(1, 0.5, 0.5);
    double shifts[4] = {0.0, 0.5, 1.0, 4.0};
    std::vector<double> values(4);
    pam_shift_maximality_report sup{};
    CHECK(pam_verify_shift_maximality(model.ptr, 1.0, shifts, 4, values.data(), &sup) ==
          PAM_OK);
    CHECK(sup.pass == 1);
    CHECK(values[0] == doctest::Approx(sup.reference).epsilon(1e-8));

    pam_increment_bound_report tb{};
    CHECK(pam_verify_time_increment_bound(model.ptr, 1.0, 0.25, 0.5, shifts, 4, &tb) == PAM_OK);
    CHECK(tb.pass == 1);
    CHECK(tb.slack_ratio < 1.0);
    double zv = 0.125;
    pam_increment_bound_report sb{};
    CHECK(pam_verify_space_increment_bound(model.ptr, 1.0, &zv, 1, 0.5, shifts, 4, &sb) ==
          PAM_OK);
    CHECK(sb.pass == 1);

    pam_inequality_entry entries[5];
    int n_entries = 0, pass = 0;
    CHECK(pam_fuzz_scalar_inequalities(20000, 11, entries, &n_entries, &pass) == PAM_OK);
    CHECK(n_entries == 5);
    CHECK(pass == 1);

    std::vector<double> lags;
    for (int k = 4; k <= 10; ++k) lags.push_back(std::pow(2.0, -k));
    std::vector<double> moments(lags.size());
    pam_regularity_fit fit{};
    CHECK(pam_fit_increment_exponent(model.ptr, 0, 0.5, lags.data(), (int)lags.size(), 0.05,
                                     0.15, moments.data(), &fit) == PAM_OK);
    CHECK(fit.pass_lower == 1);
    CHECK(fit.theory_exponent == doctest::Approx(0.75));
    CHECK(moments[0] > moments[3]);
    CHECK(pam_fit_increment_exponent(model.ptr, 2, 0.5, lags.data(), (int)lags.size(), 0.05,
                                     0.15, nullptr, &fit) == PAM_ERR_INVALID_ARGUMENT);
}
