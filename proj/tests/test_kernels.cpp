#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pam/kernels.hpp"
#include "support/oracles.hpp"

using namespace pam;

namespace {
const QuadratureSpec kQuad{};
}

TEST_CASE("propagator energy closed forms") {
    auto white = SpatialSpectralModel::create(1, 1.0);
    CHECK(propagator_energy(white, 1.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    auto half = SpatialSpectralModel::create(1, 0.5);
    CHECK(propagator_energy(half, 1.0) == doctest::Approx(std::tgamma(0.25)).epsilon(1e-14));
    CHECK_THROWS_AS(propagator_energy(half, 0.0), std::invalid_argument);
}

TEST_CASE("propagator energy scaling law") {
    for (double alpha : {0.3, 0.5, 1.0}) {
        auto model = SpatialSpectralModel::create(1, alpha);
        for (double t : {0.1, 0.5, 2.0}) {
            double lhs = propagator_energy(model, 4.0 * t);
            double rhs = std::pow(4.0, -0.5 * alpha) * propagator_energy(model, t);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("quadrature path agrees with the closed form") {
    struct Case {
        int d;
        double alpha;
    };
    for (Case c : {Case{1, 0.5}, Case{1, 1.0}, Case{2, 1.3}, Case{3, 0.7}}) {
        auto model = SpatialSpectralModel::create(c.d, c.alpha);
        for (double t : {0.25, 1.0, 4.0}) {
            double closed = propagator_energy(model, t);
            double quad = propagator_energy_quadrature(model, t, kQuad);
            CHECK(quad == doctest::Approx(closed).epsilon(1e-9));
        }
    }
}

TEST_CASE("energy mass antiderivative") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    QuadratureSpec quad;
    double direct = integrate_power_weight(
        [&](double s) { return propagator_energy(model, s) * std::pow(s, 0.25); }, 0.3, -0.25,
        quad);
    CHECK(propagator_energy_mass(model, 0.3) == doctest::Approx(direct).epsilon(1e-11));
    CHECK(propagator_energy_mass(model, 0.0) == 0.0);
}

TEST_CASE("closed convolution powers start correctly and vanish at zero") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    double c = model.gaussian_constant();
    CHECK(convolution_power(model, 0, 0.7) == 1.0);
    CHECK(convolution_power(model, 1, 0.7) ==
          doctest::Approx(c * std::pow(0.7, 0.75) / 0.75).epsilon(1e-13));
    CHECK(convolution_power(model, 3, 0.0) == 0.0);
    CHECK(convolution_power(model, 5, 1e-9) < 1e-20);
}

TEST_CASE("kernel table quadrature reproduces the closed chain to 1e-6") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    auto table = build_kernel_table(model, 5, 4.0, 1024, kQuad);
    REQUIRE(table.n_grid == 1024);
    for (double t : {0.25, 1.0, 4.0}) {
        int i = static_cast<int>(t / table.step() + 0.5) - 1;
        REQUIRE(std::abs(table.times[i] - t) < 1e-12);
        for (int n = 1; n <= 5; ++n) {
            double ref = convolution_power(model, n, t);
            CHECK(table.h_values[n][i] == doctest::Approx(ref).epsilon(1e-6));
        }
    }
}

TEST_CASE("kernel table invariants") {
    auto model = SpatialSpectralModel::create(1, 0.8);
    auto table = build_kernel_table(model, 4, 1.0, 128, kQuad);
    for (int i = 0; i < table.n_grid; ++i) {
        CHECK(table.k_values[i] > 0.0);
        if (i > 0) CHECK(table.k_values[i] <= table.k_values[i - 1]);
        for (int n = 0; n <= 4; ++n) {
            if (n == 0) CHECK(table.h_values[0][i] == 1.0);
            if (i > 0 && n >= 1) CHECK(table.h_values[n][i] >= table.h_values[n][i - 1]);
        }
    }
    // First node matches the closed form (h_1 vanishes towards 0).
    CHECK(table.h_values[1][0] ==
          doctest::Approx(convolution_power(model, 1, table.times[0])).epsilon(1e-8));
    CHECK_THROWS_AS(build_kernel_table(model, 21, 1.0, 128, kQuad), std::invalid_argument);
    CHECK_THROWS_AS(build_kernel_table(model, 4, 1.0, 4, kQuad), std::invalid_argument);
    CHECK_THROWS_AS(build_kernel_table(model, 0, 1.0, 128, kQuad), std::invalid_argument);
}

TEST_CASE("kernel table CSV format") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    auto table = build_kernel_table(model, 3, 1.0, 16, kQuad);
    std::string csv = kernel_table_csv(table, true);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,k,h1,h2,h3");
    int rows = 0;
    std::string line, last;
    while (std::getline(lines, line)) {
        if (!line.empty()) last = line;
        if (!line.empty() && line[0] != '#') ++rows;
    }
    CHECK(rows == 16);
    CHECK(last.substr(0, 10) == "# selftest");
    // 17 significant digits round-trip.
    std::string body = csv.substr(csv.find('\n') + 1);
    double t_back = std::strtod(body.c_str(), nullptr);
    CHECK(t_back == table.times[0]);
}

TEST_CASE("moment series against the Mittag-Leffler reference") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    const double p = 1.0 - 0.5 * model.alpha;
    for (double t : {0.5, 1.0}) {
        for (double g : {0.5, 1.0, 2.0}) {
            double z = g * model.gaussian_constant() * std::tgamma(p) * std::pow(t, p);
            long double ref = oracles::mittag_leffler(p, z);
            SeriesValue got = moment_series(model, t, g);
            CHECK(std::abs((double)(got.value / ref - 1.0L)) < 1e-8);
            CHECK(got.truncation_index > 3);
        }
    }
    CHECK(moment_series(model, 0.7, 0.0).value == 1.0);
    CHECK(moment_series(model, 0.0, 3.0).value == 1.0);
}

TEST_CASE("moment series monotonicity and the sqrt variant") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    double prev_t = 0.0;
    for (double t : {0.25, 0.5, 1.0}) {
        double v = moment_series(model, t, 1.0).value;
        CHECK(v > prev_t);
        prev_t = v;
    }
    double prev_g = 0.0;
    for (double g : {0.5, 1.0, 2.0}) {
        double v = moment_series(model, 1.0, g).value;
        CHECK(v > prev_g);
        prev_g = v;
        double tilde = moment_series_sqrt(model, 1.0, g).value;
        CHECK(tilde >= std::sqrt(moment_series(model, 1.0, g).value));
    }
    CHECK(moment_series_sqrt(model, 1.0, 0.0).value == 1.0);
    // Large weights force the peak past the table cap but the series still
    // truncates once the terms decay (needed for the p-moment bounds).
    SeriesValue big = moment_series_sqrt(model, 1.0, 12.0);
    CHECK(big.truncation_index > 20);
    CHECK(std::isfinite(big.value));
    CHECK_THROWS_AS(moment_series(model, 1.0, 1e200), NumericalError);
}

TEST_CASE("energy Holder integral matches the closed form and the measure condition") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    const double a = 0.25;  // alpha/2
    for (int i = 1; i <= 20; ++i) {
        double eta = i / 21.0;
        double v = holder_energy_integral(model, eta, kQuad);
        double measure = holder_integral(model, eta, kQuad);
        CHECK(std::isfinite(v) == std::isfinite(measure));
        if (std::isfinite(v)) {
            double ref = model.gaussian_constant() / (eta - a);
            CHECK(v == doctest::Approx(ref).epsilon(1e-10));
        }
    }
    CHECK(std::isinf(holder_energy_integral(model, 0.25, kQuad)));
}

TEST_CASE("weighted energy integral") {
    auto model = SpatialSpectralModel::create(1, 1.0);
    double theta = 0.25;
    double got = weighted_energy_integral(model, 1.0, theta, kQuad);
    double ref = model.gaussian_constant() * std::pow(1.0, 0.25) / 0.25;
    CHECK(got == doctest::Approx(ref).epsilon(1e-11));
    CHECK(weighted_energy_integral(model, 0.0, theta, kQuad) == 0.0);
    double prev = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
        double v = weighted_energy_integral(model, t, theta, kQuad);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(weighted_energy_integral(model, 1.0, 0.6, kQuad), std::invalid_argument);
}
