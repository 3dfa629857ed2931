#ifndef PAM_SPECTRAL_HPP
#define PAM_SPECTRAL_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pam/quadrature.hpp"

namespace pam {

inline constexpr double kInfiniteIntegral = std::numeric_limits<double>::infinity();

/// Spatial spectral measure of the noise: radial density g(xi) = |xi|^(alpha-d)
/// on R^d.  Admissible range is 0 < alpha < 2 and alpha <= d; alpha < 2 is
/// Dalang's condition for this family, alpha <= d keeps the measure tempered
/// with a locally integrable covariance kernel (alpha = d is spatial white
/// noise, reachable only for d = 1).
struct SpatialSpectralModel {
    int dimension = 1;
    double alpha = 0.5;

    static SpatialSpectralModel create(int dimension, double alpha);

    /// Surface area of the unit sphere S^{d-1} (2, 2*pi, 4*pi).
    double sphere_area() const;
    /// c_{d,alpha} in k(t) = c * t^(-alpha/2):  S_{d-1} * Gamma(alpha/2) / 2.
    double gaussian_constant() const;
    /// Radial density against dr including the angular factor: S_{d-1} r^(alpha-1).
    double radial_weight_exponent() const { return alpha - 1.0; }
};

/// Temporal covariance gamma(t) = |t|^(-beta), beta in (0,1).
struct TemporalCovariance {
    double beta = 0.5;

    static TemporalCovariance create(double beta);
};

/// The two covariance structures plus the quadrature budget shared by all
/// downstream computations.
struct NoiseModel {
    SpatialSpectralModel spatial;
    TemporalCovariance temporal;
    QuadratureSpec quad;

    static NoiseModel create(int dimension, double alpha, double beta,
                             const QuadratureSpec& quad = QuadratureSpec{});
};

/// gamma(t); +infinity sentinel at t = 0.
double gamma_eval(const TemporalCovariance& model, double t);

/// Gamma_t = 2 * \int_0^t gamma(s) ds = 2 t^(1-beta) / (1-beta), t >= 0.
double covariance_mass(const TemporalCovariance& model, double t);

/// \int (1+|xi|^2)^(-1) mu(dxi); +infinity sentinel if the tail test fails.
/// Quadrature non-convergence surfaces as NumericalError, never as infinity.
double dalang_integral(const SpatialSpectralModel& model, const QuadratureSpec& quad);

/// \int (1+|xi|^2)^(-eta) mu(dxi) for eta in (0,1); finite iff 2*eta > alpha.
double holder_integral(const SpatialSpectralModel& model, double eta,
                       const QuadratureSpec& quad);

/// Infimum of admissible Holder-condition exponents: alpha / 2.
double minimal_eta(const SpatialSpectralModel& model);

/// \int F(|xi|) mu(dxi) = S_{d-1} \int_0^inf F(r) r^(alpha-1) dr for a radial
/// integrand that is negligible beyond r_max.
double spectral_radial_integral(const SpatialSpectralModel& model, const Integrand& f_of_r,
                                double r_max, const QuadratureSpec& quad);

/// \int F(|xi n + e z|^2, (xi + e z).z) mu(dxi) where z is a unit vector and the
/// shift is e*z: the generic shifted spectral integral, reduced per dimension
/// (d=1 direct, d=2 polar angle, d=3 cosine).  f takes (rho^2, projection).
double offset_spectral_integral(const SpatialSpectralModel& model,
                                const std::function<double(double, double)>& f,
                                double shift, double decay_scale,
                                const QuadratureSpec& quad);

/// \int exp(-tau |xi + eta|^2) mu(dxi) with |eta| = shift (Gaussian case of
/// the above, with overflow-safe Bessel/sinh reductions for d = 2, 3).
double offset_gaussian_integral(const SpatialSpectralModel& model, double tau, double shift,
                                const QuadratureSpec& quad);

/// Unverified extension point: radial spectral density tabulated on a grid
/// (linear interpolation inside, power extrapolation outside).  Only the two
/// condition integrals are offered; no positive-definiteness check is made.
struct TabulatedRadialDensity {
    std::vector<double> r;
    std::vector<double> g;
    double tail_exponent = -3.0;
    int dimension = 1;

    double operator()(double radius) const;
};
double dalang_integral(const TabulatedRadialDensity& density, const QuadratureSpec& quad);
double holder_integral(const TabulatedRadialDensity& density, double eta,
                       const QuadratureSpec& quad);

} // namespace pam

#endif
