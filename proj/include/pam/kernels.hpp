#ifndef PAM_KERNELS_HPP
#define PAM_KERNELS_HPP

#include <string>
#include <vector>

#include "pam/spectral.hpp"

namespace pam {

/// Spectral energy of the heat propagator, k(t) = \int exp(-t|xi|^2) mu(dxi).
/// Closed Riesz form c_{d,alpha} t^(-alpha/2).
double propagator_energy(const SpatialSpectralModel& model, double t);

/// Same quantity by radial quadrature; must agree with the closed form.
double propagator_energy_quadrature(const SpatialSpectralModel& model, double t,
                                    const QuadratureSpec& quad);

/// \int_0^h k(s) ds = c h^(1-alpha/2) / (1-alpha/2).
double propagator_energy_mass(const SpatialSpectralModel& model, double h);

/// Closed-form iterated convolution power of k over the ordered simplex:
///   h_n(t) = (c Gamma(1-alpha/2))^n t^(n(1-alpha/2)) / Gamma(n(1-alpha/2)+1).
double convolution_power(const SpatialSpectralModel& model, int n, double t);

/// Precomputed k and h_0..h_{n_max} on a uniform grid over (0,T], filled by
/// the singularity-aware product quadrature h_n = h_{n-1} * k.  This is the
/// quadrature route; the closed form above is its oracle.
struct KernelTable {
    SpatialSpectralModel model;
    QuadratureSpec quad;
    double horizon = 1.0;
    int n_grid = 512;
    int n_max = 8;
    std::vector<double> times;                  // t_i = i*T/n_grid, i = 1..n_grid
    std::vector<double> k_values;               // k(t_i)
    std::vector<std::vector<double>> h_values;  // [order][i], order 0..n_max

    double step() const { return horizon / n_grid; }
};

KernelTable build_kernel_table(const SpatialSpectralModel& model, int n_max, double horizon,
                               int n_grid, const QuadratureSpec& quad);

/// CSV with fixed header "t,k,h1,...,hN" and 17-significant-digit floats.
/// With selftest enabled a trailing '#' comment line reports the maximum
/// relative deviation of the table from the closed forms.
std::string kernel_table_csv(const KernelTable& table, bool include_selftest = false);

struct SeriesValue {
    double value = 0.0;
    int truncation_index = 0;
};

/// H(t;w) = sum_n w^n h_n(t): the generating series bounding the second
/// moment.  Truncation stops once the term falls below tol * partial sum and
/// the last three term ratios are below 1/2; non-decaying terms within the
/// order cap raise NumericalError.
SeriesValue moment_series(const SpatialSpectralModel& model, double t, double weight,
                          double tol = 1e-12);

/// H~(t;w) = sum_n sqrt(w^n h_n(t)): the p-th moment series.
SeriesValue moment_series_sqrt(const SpatialSpectralModel& model, double t, double weight,
                               double tol = 1e-12);

/// \int_0^1 k(s) / s^(1-eta) ds; +infinity sentinel iff eta <= alpha/2.
/// Finiteness is equivalent to holder_integral(eta) being finite.
double holder_energy_integral(const SpatialSpectralModel& model, double eta,
                              const QuadratureSpec& quad);

/// rho_t = \int_0^t s^(-theta) k(s) ds, requires theta < 1 - alpha/2.
double weighted_energy_integral(const SpatialSpectralModel& model, double t, double theta,
                                const QuadratureSpec& quad);

} // namespace pam

#endif
