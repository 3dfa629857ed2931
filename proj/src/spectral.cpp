#include "pam/spectral.hpp"

#include <algorithm>

namespace pam {

namespace {

// e^{-z} I_0(z), Abramowitz & Stegun 9.8.1 / 9.8.2.
double scaled_bessel_i0e(double z) {
    if (z < 3.75) {
        double t = z / 3.75;
        t *= t;
        double i0 = 1.0 + t * (3.5156229 + t * (3.0899424 + t * (1.2067492 +
                    t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))));
        return i0 * std::exp(-z);
    }
    double t = 3.75 / z;
    double p = 0.39894228 + t * (0.01328592 + t * (0.00225319 + t * (-0.00157565 +
               t * (0.00916281 + t * (-0.02057706 + t * (0.02635537 +
               t * (-0.01647633 + t * 0.00392377)))))));
    return p / std::sqrt(z);
}

} // namespace

SpatialSpectralModel SpatialSpectralModel::create(int dimension, double alpha) {
    require(dimension >= 1 && dimension <= 3, "SpatialSpectralModel: dimension must be 1, 2 or 3");
    require(alpha > 0.0 && alpha < 2.0, "SpatialSpectralModel: alpha must lie in (0,2)");
    require(alpha <= static_cast<double>(dimension),
            "SpatialSpectralModel: alpha must not exceed the dimension");
    return SpatialSpectralModel{dimension, alpha};
}

double SpatialSpectralModel::sphere_area() const {
    switch (dimension) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        default: return 4.0 * M_PI;
    }
}

double SpatialSpectralModel::gaussian_constant() const {
    return 0.5 * sphere_area() * std::tgamma(0.5 * alpha);
}

TemporalCovariance TemporalCovariance::create(double beta) {
    require(beta > 0.0 && beta < 1.0, "TemporalCovariance: beta must lie in (0,1)");
    return TemporalCovariance{beta};
}

NoiseModel NoiseModel::create(int dimension, double alpha, double beta,
                              const QuadratureSpec& quad) {
    quad.validate();
    return NoiseModel{SpatialSpectralModel::create(dimension, alpha),
                      TemporalCovariance::create(beta), quad};
}

double gamma_eval(const TemporalCovariance& model, double t) {
    if (t == 0.0) return kInfiniteIntegral;
    return std::pow(std::abs(t), -model.beta);
}

double covariance_mass(const TemporalCovariance& model, double t) {
    require(t >= 0.0, "covariance_mass: t must be >= 0");
    if (t == 0.0) return 0.0;
    return 2.0 * std::pow(t, 1.0 - model.beta) / (1.0 - model.beta);
}

double dalang_integral(const SpatialSpectralModel& model, const QuadratureSpec& quad) {
    quad.validate();
    if (model.alpha >= 2.0) return kInfiniteIntegral;
    const double a = model.alpha;
    // Split at |xi| = 1 and invert the tail; both halves carry pure power
    // endpoint weights which the substitution absorbs exactly.
    double inner = integrate_power_weight([](double r) { return 1.0 / (1.0 + r * r); },
                                          1.0, a - 1.0, quad);
    double outer = integrate_power_weight([](double v) { return 1.0 / (1.0 + v * v); },
                                          1.0, 1.0 - a, quad);
    return model.sphere_area() * (inner + outer);
}

double holder_integral(const SpatialSpectralModel& model, double eta,
                       const QuadratureSpec& quad) {
    require(eta > 0.0 && eta < 1.0, "holder_integral: eta must lie in (0,1)");
    quad.validate();
    const double a = model.alpha;
    if (2.0 * eta <= a) return kInfiniteIntegral;
    double inner = integrate_power_weight(
        [eta](double r) { return std::pow(1.0 + r * r, -eta); }, 1.0, a - 1.0, quad);
    // Tail r -> 1/v:  integrand v^(2 eta - a - 1) (1 + v^2)^(-eta).
    double outer = integrate_power_weight(
        [eta](double v) { return std::pow(1.0 + v * v, -eta); }, 1.0, 2.0 * eta - a - 1.0, quad);
    return model.sphere_area() * (inner + outer);
}

double minimal_eta(const SpatialSpectralModel& model) { return 0.5 * model.alpha; }

double spectral_radial_integral(const SpatialSpectralModel& model, const Integrand& f_of_r,
                                double r_max, const QuadratureSpec& quad) {
    require(r_max > 0.0, "spectral_radial_integral: r_max must be > 0");
    const double a = model.alpha;
    const double split = quad.singularity_split * std::min(1.0, r_max);
    double inner = integrate_power_weight(f_of_r, split, a - 1.0, quad);
    double outer = 0.0;
    if (r_max > split) {
        outer = integrate_adaptive(
            [&](double r) { return f_of_r(r) * std::pow(r, a - 1.0); }, split, r_max, quad);
    }
    return model.sphere_area() * (inner + outer);
}

double offset_spectral_integral(const SpatialSpectralModel& model,
                                const std::function<double(double, double)>& f,
                                double shift, double decay_scale,
                                const QuadratureSpec& quad) {
    require(shift >= 0.0, "offset_spectral_integral: shift must be >= 0");
    require(decay_scale > 0.0, "offset_spectral_integral: decay scale must be > 0");
    const double a = model.alpha;
    const double e = shift;
    const double r_max = e + std::sqrt(45.0 / decay_scale);

    Integrand radial;
    switch (model.dimension) {
        case 1:
            radial = [&](double r) {
                double up = r + e, dn = r - e;
                return f(up * up, up) + f(dn * dn, dn);
            };
            break;
        case 2:
            radial = [&](double r) {
                QuadratureSpec inner = quad;
                inner.abs_tol = std::max(quad.abs_tol, 1e-14);
                return 2.0 * integrate_adaptive(
                           [&](double phi) {
                               double c = std::cos(phi);
                               return f(r * r + e * e + 2.0 * r * e * c, r * c + e);
                           },
                           0.0, M_PI, inner);
            };
            break;
        default:
            radial = [&](double r) {
                QuadratureSpec inner = quad;
                inner.abs_tol = std::max(quad.abs_tol, 1e-14);
                return 2.0 * M_PI * integrate_adaptive(
                           [&](double c) {
                               return f(r * r + e * e + 2.0 * r * e * c, r * c + e);
                           },
                           -1.0, 1.0, inner);
            };
            break;
    }

    const double split = quad.singularity_split * std::min(1.0, r_max);
    double inner_part = integrate_power_weight(radial, split, a - 1.0, quad);
    double outer_part = integrate_adaptive(
        [&](double r) { return radial(r) * std::pow(r, a - 1.0); }, split, r_max, quad);
    return inner_part + outer_part;
}

double offset_gaussian_integral(const SpatialSpectralModel& model, double tau, double shift,
                                const QuadratureSpec& quad) {
    require(tau > 0.0, "offset_gaussian_integral: tau must be > 0");
    require(shift >= 0.0, "offset_gaussian_integral: shift must be >= 0");
    const double a = model.alpha;
    const double e = shift;
    const double r_max = e + std::sqrt(45.0 / tau);

    Integrand radial;
    switch (model.dimension) {
        case 1:
            radial = [&](double r) {
                return std::exp(-tau * (r + e) * (r + e)) + std::exp(-tau * (r - e) * (r - e));
            };
            break;
        case 2:
            radial = [&](double r) {
                return 2.0 * M_PI * std::exp(-tau * (r - e) * (r - e)) *
                       scaled_bessel_i0e(2.0 * tau * r * e);
            };
            break;
        default:
            // Angular average over the sphere: 2 pi \int_-1^1 e^{-zc} dc
            // = 4 pi sinh(z)/z.
            radial = [&](double r) {
                if (e == 0.0) return 4.0 * M_PI * std::exp(-tau * r * r);
                double z = 2.0 * tau * r * e;
                if (z < 1e-8) {
                    return 4.0 * M_PI * std::exp(-tau * (r * r + e * e)) * (1.0 + z * z / 6.0);
                }
                double lo = std::exp(-tau * (r - e) * (r - e));
                double hi = std::exp(-tau * (r + e) * (r + e));
                return 2.0 * M_PI * (lo - hi) / z;
            };
            break;
    }

    const double split = quad.singularity_split * std::min(1.0, r_max);
    double inner_part = integrate_power_weight(radial, split, a - 1.0, quad);
    double outer_part = integrate_adaptive(
        [&](double r) { return radial(r) * std::pow(r, a - 1.0); }, split, r_max, quad);
    return inner_part + outer_part;
}

double TabulatedRadialDensity::operator()(double radius) const {
    if (r.empty() || g.size() != r.size()) throw std::invalid_argument("TabulatedRadialDensity: bad table");
    if (radius <= r.front()) return g.front();
    if (radius >= r.back()) return g.back() * std::pow(radius / r.back(), tail_exponent);
    auto it = std::upper_bound(r.begin(), r.end(), radius);
    size_t i = static_cast<size_t>(it - r.begin());
    double w = (radius - r[i - 1]) / (r[i] - r[i - 1]);
    return g[i - 1] * (1.0 - w) + g[i] * w;
}

namespace {

double tabulated_condition_integral(const TabulatedRadialDensity& density, double exponent,
                                    const QuadratureSpec& quad) {
    require(density.dimension >= 1 && density.dimension <= 3,
            "TabulatedRadialDensity: dimension must be 1, 2 or 3");
    const double d = density.dimension;
    // Tail test: integrand ~ r^(tail + d - 1 - 2*exponent).
    if (density.tail_exponent + d - 1.0 - 2.0 * exponent >= -1.0) return kInfiniteIntegral;
    const double sphere = (density.dimension == 1) ? 2.0
                        : (density.dimension == 2) ? 2.0 * M_PI : 4.0 * M_PI;
    const double R = density.r.back();
    double body = integrate_adaptive(
        [&](double r) {
            return density(r) * std::pow(r, d - 1.0) * std::pow(1.0 + r * r, -exponent);
        },
        0.0, R, quad);
    double tail = integrate_adaptive(
        [&](double v) {
            double r = R / v;
            return density(r) * std::pow(r, d - 1.0) * std::pow(1.0 + r * r, -exponent) * R /
                   (v * v);
        },
        1e-6, 1.0, quad);
    return sphere * (body + tail);
}

} // namespace

double dalang_integral(const TabulatedRadialDensity& density, const QuadratureSpec& quad) {
    return tabulated_condition_integral(density, 1.0, quad);
}

double holder_integral(const TabulatedRadialDensity& density, double eta,
                       const QuadratureSpec& quad) {
    require(eta > 0.0 && eta < 1.0, "holder_integral: eta must lie in (0,1)");
    return tabulated_condition_integral(density, eta, quad);
}

} // namespace pam
