#ifndef PAM_QUADRATURE_HPP
#define PAM_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "pam/common.hpp"

namespace pam {

/// Tolerances and node budget for all 1-D quadrature in the library.
/// singularity_split is the fraction of an interval handed to the
/// substituted (singularity-absorbing) rule when an endpoint is singular.
struct QuadratureSpec {
    int node_count = 64;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double singularity_split = 0.5;

    void validate() const {
        require(node_count >= 8, "QuadratureSpec: node_count must be >= 8");
        require(abs_tol > 0.0 && rel_tol > 0.0, "QuadratureSpec: tolerances must be > 0");
        require(singularity_split > 0.0 && singularity_split < 1.0,
                "QuadratureSpec: singularity_split must lie in (0,1)");
    }
};

struct GaussRule {
    std::vector<double> nodes;   // on [-1,1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n (cached per n).
const GaussRule& gauss_rule(int n);

using Integrand = std::function<double(double)>;

/// Fixed-order Gauss-Legendre on [a,b].
double gauss_fixed(const Integrand& f, double a, double b, int n);

/// Globally adaptive Gauss-Legendre (worst-interval refinement).
/// Throws NumericalError if the tolerance cannot be met within the
/// interval budget.
double integrate_adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec);

/// Exact power-weight absorption:
///   integrate_power_weight(g, L, p) = \int_0^L v^p g(v) dv,   p > -1,
/// computed by the substitution v = tau^{1/(1+p)} which maps the weight
/// to a constant.  g must be smooth on (0,L].
double integrate_power_weight(const Integrand& g, double L, double p, const QuadratureSpec& spec);

/// \int_a^b g(s) (s-a)^p ds  and  \int_a^b g(s) (b-s)^p ds,  p > -1.
double integrate_left_power(const Integrand& g, double a, double b, double p,
                            const QuadratureSpec& spec);
double integrate_right_power(const Integrand& g, double a, double b, double p,
                             const QuadratureSpec& spec);

/// Least-squares straight line through (x_i, y_i); returns {slope, intercept,
/// rms residual}.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace pam

#endif
