// Independent reference computations used only by tests.  These deliberately
// avoid the library's integration routes: plain long-double series, dense
// midpoint grids with Richardson extrapolation, brute-force sums.
#ifndef PAM_TESTS_ORACLES_HPP
#define PAM_TESTS_ORACLES_HPP

#include <cmath>
#include <vector>

#include "pam/spectral.hpp"

namespace oracles {

// Mittag-Leffler E_rho(z) by direct high-precision summation.
inline long double mittag_leffler(long double rho, long double z) {
    long double sum = 1.0L;  // n = 0 term
    for (int n = 1; n < 4000; ++n) {
        long double term = std::exp(n * std::log(z) - std::lgamma(rho * n + 1.0L));
        sum += term;
        if (n > 5 && term < 1e-27L * sum) break;
    }
    return sum;
}

// Exact mass of |r-s|^(-beta) over a rectangle, second-antiderivative form.
inline double gamma_rect_mass(double x1, double x2, double y1, double y2, double beta) {
    auto g2 = [beta](double w) {
        return std::pow(std::abs(w), 2.0 - beta) / ((1.0 - beta) * (2.0 - beta));
    };
    return g2(x2 - y1) + g2(x1 - y2) - g2(x1 - y1) - g2(x2 - y2);
}

// Dense-grid evaluation of the first-chaos cross moment
//   \int_0^a \int_0^b |r-s|^(-beta) k((a+b)/2 - (r+s)/2) dr ds
// using midpoint cells, with the covariance mass integrated exactly on cells
// that meet the diagonal.
inline double cross_moment_grid(const pam::NoiseModel& model, double a, double b, int n) {
    const double beta = model.temporal.beta;
    const double c = model.spatial.gaussian_constant();
    const double ha = a / n, hb = b / n;
    const double mid = 0.5 * (a + b);
    const double half_alpha = 0.5 * model.spatial.alpha;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double r0 = i * ha, r1 = r0 + ha, rc = r0 + 0.5 * ha;
        for (int j = 0; j < n; ++j) {
            double s0 = j * hb, s1 = s0 + hb, sc = s0 + 0.5 * hb;
            double m = 0.5 * (rc + sc);
            double karg = mid - m;
            if (karg <= 0.0) karg = 0.25 * std::min(ha, hb);  // corner cell guard
            double kval = c * std::pow(karg, -half_alpha);
            bool diagonal = (r1 > s0) && (s1 > r0);
            double mass = diagonal ? gamma_rect_mass(r0, r1, s0, s1, beta)
                                   : std::pow(std::abs(rc - sc), -beta) * ha * hb;
            acc += mass * kval;
        }
    }
    return acc;
}

// Three-level Richardson extrapolation with the observed convergence order.
inline double richardson(double v1, double v2, double v4) {
    double d1 = v2 - v1, d2 = v4 - v2;
    if (d2 == 0.0) return v4;
    double rate = d1 / d2;
    if (rate <= 1.0) return v4;
    return v4 + d2 / (rate - 1.0);
}

inline double cross_moment_oracle(const pam::NoiseModel& model, double a, double b,
                                  int base_n = 160) {
    double v1 = cross_moment_grid(model, a, b, base_n);
    double v2 = cross_moment_grid(model, a, b, 2 * base_n);
    double v4 = cross_moment_grid(model, a, b, 4 * base_n);
    return richardson(v1, v2, v4);
}

// Incomplete Beta at 1/2 by the binomial series (geometric convergence):
//   B_{1/2}(p, q) = sum_k (1-q)_k / (k! (p+k)) (1/2)^{p+k}.
inline long double incomplete_beta_half(long double p, long double q) {
    long double sum = 0.0L;
    long double poch = 1.0L;  // (1-q)_k / k!
    for (int k = 0; k < 200; ++k) {
        if (k > 0) poch *= (k - q) / k;
        long double term = poch / (p + k) * std::pow(0.5L, p + k);
        sum += term;
        if (k > 8 && std::abs(term) < 1e-24L * std::abs(sum)) break;
    }
    return sum;
}

// Exact closed form of alpha_1(t) for the Riesz family:
//   alpha_1(t) = (2^{2-beta} c / (1-beta)) t^{2-beta-alpha/2}
//                [ B_{1/2}(2-beta, 1-alpha/2) + (1/2)^{2-beta-alpha/2} / (2-beta-alpha/2) ].
inline double alpha1_closed(const pam::NoiseModel& model, double t) {
    const long double beta = model.temporal.beta;
    const long double a = 0.5L * model.spatial.alpha;
    const long double c = model.spatial.gaussian_constant();
    const long double expo = 2.0L - beta - a;
    long double bracket = incomplete_beta_half(2.0L - beta, 1.0L - a) +
                          std::pow(0.5L, expo) / expo;
    return static_cast<double>(std::pow(2.0L, 2.0L - beta) * c / (1.0L - beta) *
                               std::pow((long double)t, expo) * bracket);
}

} // namespace oracles

#endif
