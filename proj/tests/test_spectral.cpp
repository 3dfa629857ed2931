#include <doctest.h>

#include <cmath>

#include "pam/kernels.hpp"
#include "pam/spectral.hpp"

using namespace pam;

namespace {
const QuadratureSpec kQuad{};
}

TEST_CASE("model validation enforces the admissible parameter region") {
    CHECK_NOTHROW(SpatialSpectralModel::create(1, 0.5));
    CHECK_NOTHROW(SpatialSpectralModel::create(1, 1.0));  // spatial white noise edge
    CHECK_NOTHROW(SpatialSpectralModel::create(2, 1.9));
    CHECK_THROWS_AS(SpatialSpectralModel::create(1, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(SpatialSpectralModel::create(1, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(SpatialSpectralModel::create(2, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialSpectralModel::create(4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(SpatialSpectralModel::create(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TemporalCovariance::create(0.0), std::invalid_argument);
    CHECK_THROWS_AS(TemporalCovariance::create(1.0), std::invalid_argument);
    CHECK_NOTHROW(NoiseModel::create(1, 0.5, 0.5));
}

TEST_CASE("temporal covariance point values") {
    auto model = TemporalCovariance::create(0.5);
    CHECK(gamma_eval(model, 4.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::isinf(gamma_eval(model, 0.0)));
    auto quarter = TemporalCovariance::create(0.25);
    CHECK(gamma_eval(quarter, -1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("covariance mass closed form and monotonicity") {
    auto model = TemporalCovariance::create(0.5);
    CHECK(covariance_mass(model, 0.0) == 0.0);
    CHECK(covariance_mass(model, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(covariance_mass(model, 4.0) == doctest::Approx(8.0).epsilon(1e-14));
    double prev = 0.0;
    for (int i = 1; i <= 30; ++i) {
        double v = covariance_mass(model, i / 10.0);
        CHECK(v > prev);
        prev = v;
    }
    // Continuity at 0.
    CHECK(covariance_mass(model, 1e-12) < 1e-5);
}

TEST_CASE("dalang integral matches the closed Riesz value") {
    struct Case {
        int d;
        double alpha;
    };
    for (Case c : {Case{1, 0.5}, Case{1, 1.0}, Case{2, 1.3}, Case{3, 1.9}, Case{3, 0.4}}) {
        auto model = SpatialSpectralModel::create(c.d, c.alpha);
        double got = dalang_integral(model, kQuad);
        double ref = model.sphere_area() * 0.5 * M_PI / std::sin(0.5 * M_PI * c.alpha);
        CHECK(got == doctest::Approx(ref).epsilon(1e-10));
        CHECK(std::isfinite(got));
    }
}

TEST_CASE("radial reduction agrees with direct one-dimensional quadrature") {
    auto model = SpatialSpectralModel::create(1, 0.7);
    QuadratureSpec quad;
    // Direct two-sided integral of (1+xi^2)^-1 |xi|^(alpha-1) over R.
    double direct = 2.0 * (integrate_power_weight(
                               [](double r) { return 1.0 / (1.0 + r * r); }, 1.0,
                               model.alpha - 1.0, quad) +
                           integrate_adaptive(
                               [&](double r) {
                                   return std::pow(r, model.alpha - 1.0) / (1.0 + r * r);
                               },
                               1.0, 1e8, quad));
    double radial = dalang_integral(model, quad);
    CHECK(radial == doctest::Approx(direct).epsilon(1e-7));
}

TEST_CASE("holder integral: closed form, sentinel region, monotonicity") {
    auto model = SpatialSpectralModel::create(1, 0.5);
    double eta = 0.5;
    double ref = model.sphere_area() * 0.5 *
                 std::exp(std::lgamma(0.25) + std::lgamma(eta - 0.25) - std::lgamma(eta));
    CHECK(holder_integral(model, eta, kQuad) == doctest::Approx(ref).epsilon(1e-10));

    // Finite iff eta > alpha/2, checked on a 20-point grid.
    double eta_star = minimal_eta(model);
    double prev = kInfiniteIntegral;
    for (int i = 1; i <= 20; ++i) {
        double e = i / 21.0;
        double v = holder_integral(model, e, kQuad);
        CHECK(std::isfinite(v) == (e > eta_star));
        if (std::isfinite(v) && std::isfinite(prev)) CHECK(v <= prev);
        prev = v;
    }
    CHECK(std::isinf(holder_integral(model, 0.25, kQuad)));  // boundary 2 eta = alpha
    CHECK_THROWS_AS(holder_integral(model, 0.0, kQuad), std::invalid_argument);
}

TEST_CASE("minimal eta is alpha/2") {
    CHECK(minimal_eta(SpatialSpectralModel::create(1, 0.5)) == doctest::Approx(0.25));
    CHECK(minimal_eta(SpatialSpectralModel::create(2, 1.5)) == doctest::Approx(0.75));
    CHECK(minimal_eta(SpatialSpectralModel::create(1, 1e-6)) == doctest::Approx(5e-7));
}

TEST_CASE("offset gaussian integral: centered value, decay, consistency") {
    for (int d : {1, 2, 3}) {
        double alpha = (d == 1) ? 0.5 : 1.2;
        auto model = SpatialSpectralModel::create(d, alpha);
        for (double t : {0.25, 1.0}) {
            double centered = offset_gaussian_integral(model, t, 0.0, kQuad);
            CHECK(centered == doctest::Approx(propagator_energy(model, t)).epsilon(1e-8));
            // Power-law spectral density: the shifted mass decays like the
            // density itself, value ~ (pi/t)^(d/2) |eta|^(alpha-d).
            double shift = 10.0 / std::sqrt(t);
            double far = offset_gaussian_integral(model, t, shift, kQuad);
            double asym = std::pow(M_PI / t, 0.5 * d) * std::pow(shift, alpha - d);
            CHECK(far == doctest::Approx(asym).epsilon(0.1));
            CHECK(far < centered);
            double near = offset_gaussian_integral(model, t, 0.3, kQuad);
            CHECK(near < centered * (1.0 + 1e-9));
        }
    }
    // Spatial white noise: the shifted mass is exactly constant.
    auto white = SpatialSpectralModel::create(1, 1.0);
    double c0 = offset_gaussian_integral(white, 0.5, 0.0, kQuad);
    double c5 = offset_gaussian_integral(white, 0.5, 5.0, kQuad);
    CHECK(c0 == doctest::Approx(std::sqrt(M_PI / 0.5)).epsilon(1e-9));
    CHECK(c5 == doctest::Approx(c0).epsilon(1e-9));
}

TEST_CASE("generic offset integral agrees with the Bessel-reduced Gaussian path") {
    for (int d : {1, 2, 3}) {
        auto model = SpatialSpectralModel::create(d, d == 1 ? 0.8 : 1.4);
        double t = 0.7, shift = 1.3;
        auto f = [t](double rho2, double) { return std::exp(-t * rho2); };
        double generic = offset_spectral_integral(model, f, shift, t, kQuad);
        double bessel = offset_gaussian_integral(model, t, shift, kQuad);
        CHECK(generic == doctest::Approx(bessel).epsilon(1e-7));
    }
}

TEST_CASE("tabulated density extension point evaluates the condition integrals") {
    // A table mimicking |xi|^(alpha-1) with alpha = 0.5 in d = 1.
    TabulatedRadialDensity density;
    density.dimension = 1;
    density.tail_exponent = -0.5;
    for (int i = 1; i <= 400; ++i) {
        double r = i * 0.05;
        density.r.push_back(r);
        density.g.push_back(std::pow(r, -0.5));
    }
    double got = dalang_integral(density, kQuad);
    auto riesz = SpatialSpectralModel::create(1, 0.5);
    double ref = dalang_integral(riesz, kQuad);
    CHECK(std::isfinite(got));
    CHECK(std::abs(got / ref - 1.0) < 0.15);  // coarse table, unverified path
    TabulatedRadialDensity fat = density;
    fat.tail_exponent = 1.5;
    CHECK(std::isinf(dalang_integral(fat, kQuad)));
}
