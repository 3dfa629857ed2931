#ifndef PAM_CHAOS_HPP
#define PAM_CHAOS_HPP

#include <cstdint>
#include <span>

#include "pam/kernels.hpp"

namespace pam {

/// E[J_1(a,x) J_1(b,x)] (x-independent): the first-chaos covariance
///   \int_0^a \int_0^b gamma(r-s) k((a-r+b-s)/2) dr ds,
/// reduced to one dimension by exact integration of the covariance weight in
/// the difference variable.
double chaos1_cross_moment(const NoiseModel& model, double a, double b);

/// alpha_1(t) = E|J_1(t,x)|^2.
double chaos1_second_moment(const NoiseModel& model, double t);

/// E|J_1(t1,x) - J_1(t0,x)|^2, 0 <= t0 <= t1.
double chaos1_time_increment_moment(const NoiseModel& model, double t0, double t1);

/// E|J_1(t,x+z) - J_1(t,x)|^2 for a spatial lag z (isotropic: |z| enters).
double chaos1_space_increment_moment(const NoiseModel& model, double t,
                                     std::span<const double> z);

struct QmcEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int shifts = 0;
    std::uint64_t points_per_shift = 0;
};

/// alpha_2(t) = 4 ||f~_2(.,t,x)||^2 by randomly-shifted lattice quadrature:
/// four temporal dimensions with the covariance singularities absorbed by the
/// sampling map, plus one angular dimension (the radial spectral integral is
/// exact).  d = 1 only.  std_error comes from the shift replicates.
QmcEstimate chaos2_second_moment_qmc(const NoiseModel& model, double t, std::uint64_t seed,
                                     int log2_points = 14, int shifts = 8);

/// Same machinery applied to alpha_1 (two temporal dimensions, spectral factor
/// exact); cross-validates the sampler against the deterministic route.
QmcEstimate chaos1_second_moment_qmc(const NoiseModel& model, double t, std::uint64_t seed,
                                     int log2_points = 14, int shifts = 8);

/// Gamma_t^n n! h_n(t): the chaos moment bound, valid for every order.
double chaos_moment_bound(const NoiseModel& model, int n, double t);

/// H(t; Gamma_t) >= E|u(t,x)|^2.
double solution_second_moment_bound(const NoiseModel& model, double t);

/// H~(t; (p-1) Gamma_t) >= ||u(t,x)||_p, p >= 2.
double solution_p_moment_bound(const NoiseModel& model, double t, double p);

/// Proof-assembled bounds on the first-chaos time increment:
///   overlap part  A_1 <= 2^(-theta) C_theta h^theta Gamma_t rho_{t/2},
///   fresh part    B_1 <= Gamma_{t+h} \int_0^h k(s) ds,
/// with theta = 1 - eta and C_theta = (2 theta / e)^theta.  Together
/// E|J_1(t+h)-J_1(t)|^2 <= 2 (A_1 + B_1).
double chaos1_increment_bound_overlap(const NoiseModel& model, double t, double h, double eta);
double chaos1_increment_bound_fresh(const NoiseModel& model, double t, double h);

/// Explicit Holder prefactors assembled from the moment machinery
/// (time overlap, time fresh, space), certified so that e.g.
/// sqrt(p-1) ||dJ_1||_2 <= (time_overlap + time_fresh) h^(theta/2).
struct HolderConstants {
    double time_overlap = 0.0;
    double time_fresh = 0.0;
    double space = 0.0;
};
HolderConstants holder_constants(const NoiseModel& model, double horizon, double p, double eta);

} // namespace pam

#endif
