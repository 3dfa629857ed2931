#include "pam/chaos.hpp"

#include <algorithm>
#include <array>

#include "pam/rng.hpp"

namespace pam {

namespace {

// Signed antiderivative of |w|^(-beta).
inline double gamma_antiderivative(double w, double beta) {
    if (w == 0.0) return 0.0;
    double mag = std::pow(std::abs(w), 1.0 - beta) / (1.0 - beta);
    return w > 0.0 ? mag : -mag;
}

inline double gamma_antiderivative_inverse(double y, double beta) {
    if (y == 0.0) return 0.0;
    double mag = std::pow(std::abs(y) * (1.0 - beta), 1.0 / (1.0 - beta));
    return y > 0.0 ? mag : -mag;
}

// Exact covariance mass of the difference variable over the admissible
// strip at fixed mean m: r in [0,a], s in [0,b], w = r - s.
double difference_mass(double m, double a, double b, double beta) {
    double hi = std::min(2.0 * m, 2.0 * (a - m));
    double lo = std::max(-2.0 * m, 2.0 * (m - b));
    if (hi <= lo) return 0.0;
    return gamma_antiderivative(hi, beta) - gamma_antiderivative(lo, beta);
}

} // namespace

double chaos1_cross_moment(const NoiseModel& model, double a, double b) {
    require(a >= 0.0 && b >= 0.0, "chaos1_cross_moment: times must be >= 0");
    if (a == 0.0 || b == 0.0) return 0.0;
    const double beta = model.temporal.beta;
    const double half_alpha = 0.5 * model.spatial.alpha;
    const double c = model.spatial.gaussian_constant();
    const double mean_max = 0.5 * (a + b);

    auto weight = [&](double m) { return difference_mass(m, a, b, beta); };

    // Kinks of the strip bounds; the final sub-interval carries the
    // propagator-energy endpoint singularity.
    std::array<double, 3> kink{0.5 * a, 0.5 * b, std::min(a, b)};
    std::sort(kink.begin(), kink.end());
    double acc = 0.0;
    double left = 0.0;
    double last = mean_max;
    for (double km : kink) {
        if (km <= left + 1e-15 * mean_max || km >= last - 1e-15 * mean_max) continue;
        acc += integrate_adaptive(
            [&](double m) { return weight(m) * c * std::pow(mean_max - m, -half_alpha); },
            left, km, model.quad);
        left = km;
    }
    acc += c * integrate_power_weight(
                   [&](double v) { return weight(mean_max - v); }, last - left, -half_alpha,
                   model.quad);
    return acc;
}

double chaos1_second_moment(const NoiseModel& model, double t) {
    return chaos1_cross_moment(model, t, t);
}

double chaos1_time_increment_moment(const NoiseModel& model, double t0, double t1) {
    require(t0 >= 0.0 && t1 >= t0, "chaos1_time_increment_moment: need 0 <= t0 <= t1");
    if (t0 == t1) return 0.0;
    if (t0 == 0.0) return chaos1_second_moment(model, t1);
    double v = chaos1_second_moment(model, t1) + chaos1_second_moment(model, t0) -
               2.0 * chaos1_cross_moment(model, t0, t1);
    return std::max(v, 0.0);
}

// ---------------------------------------------------------------------------
// Space increments.
//
// E|J_1(t,x+z)-J_1(t,x)|^2 = \int_0^t W(m) S_sp(t-m;|z|) dm where W is the
// exact covariance mass in the difference variable and
//   S_sp(u;zeta) = S_{d-1} zeta^(-alpha) Psi(u / zeta^2),
//   Psi(eps)     = 2 \int_0^inf (1 - Lambda_d(x)) e^(-eps x^2) x^(alpha-1) dx,
// with Lambda_d the angular average of a plane wave (cos, J_0, sinc).
// ---------------------------------------------------------------------------

namespace {

double angular_average(int d, double x) {
    switch (d) {
        case 1: return std::cos(x);
        case 2: return std::cyl_bessel_j(0.0, x);
        default: return x == 0.0 ? 1.0 : std::sin(x) / x;
    }
}

// 1 - Lambda_d(x), stable for small arguments.
double one_minus_angular_average(int d, double x) {
    switch (d) {
        case 1: {
            double s = std::sin(0.5 * x);
            return 2.0 * s * s;
        }
        case 2:
            if (std::abs(x) < 1e-2) {
                double x2 = x * x;
                return x2 / 4.0 - x2 * x2 / 64.0 + x2 * x2 * x2 / 2304.0;
            }
            return 1.0 - std::cyl_bessel_j(0.0, x);
        default:
            if (std::abs(x) < 1e-2) {
                double x2 = x * x;
                return x2 / 6.0 - x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0;
            }
            return 1.0 - std::sin(x) / x;
    }
}

// Mellin transform of Lambda_d at s (analytic continuation), as
// log-magnitude + sign.  Used by the small-eps expansion.
void angular_mellin(int d, double s, double* log_mag, double* sign) {
    switch (d) {
        case 1: {
            // Gamma(s) cos(pi s / 2)
            double ph = std::cos(0.5 * M_PI * s);
            *log_mag = std::lgamma(s) + std::log(std::abs(ph));
            *sign = ph >= 0.0 ? 1.0 : -1.0;
            return;
        }
        case 2: {
            // 2^(s-1) Gamma(s/2) / Gamma(1 - s/2) via the reflection formula.
            double z = 1.0 - 0.5 * s;
            double sz = std::sin(M_PI * z);
            *log_mag = (s - 1.0) * std::log(2.0) + std::lgamma(0.5 * s) +
                       std::log(std::abs(sz)) + std::lgamma(0.5 * s) - std::log(M_PI);
            *sign = sz >= 0.0 ? 1.0 : -1.0;
            return;
        }
        default: {
            // Gamma(s-1) sin(pi (s-1) / 2)
            double ph = std::sin(0.5 * M_PI * (s - 1.0));
            *log_mag = std::lgamma(s - 1.0) + std::log(std::abs(ph));
            *sign = ph >= 0.0 ? 1.0 : -1.0;
            return;
        }
    }
}

// 2 \int Lambda_d(x) e^(-eps x^2) x^(alpha-1) dx for eps <= 1e-3 by the
// Mellin (Watson) expansion; the exponentially small remainder is far below
// working precision in this range.
double angular_integral_series(int d, double alpha, double eps) {
    long double sum = 0.0L;
    double log_eps = std::log(eps);
    long double prev = 0.0L;
    for (int k = 0; k <= 60; ++k) {
        double lm, sg;
        angular_mellin(d, alpha + 2.0 * k, &lm, &sg);
        double log_term = lm + k * log_eps - std::lgamma(k + 1.0);
        long double term = sg * std::exp(log_term) * ((k % 2 == 0) ? 1.0L : -1.0L);
        // Mellin continuation carries the (-1)^k from (-eps)^k and the phase
        // factor together; combine explicitly.
        sum += term;
        if (k > 2 && std::abs((double)term) < 1e-18 * std::abs((double)sum) &&
            std::abs((double)prev) < 1e-18 * std::abs((double)sum))
            break;
        prev = term;
    }
    return 2.0 * static_cast<double>(sum);
}

// Same quantity by quadrature with oscillation-aware segmentation,
// for moderate eps.
double angular_integral_quadrature(int d, double alpha, double eps,
                                   const QuadratureSpec& quad) {
    const double cutoff = std::sqrt(45.0 / eps);
    double head = integrate_power_weight(
        [&](double x) { return angular_average(d, x) * std::exp(-eps * x * x); },
        std::min(1.0, cutoff), alpha - 1.0, quad);
    double tail = 0.0;
    double left = 1.0;
    while (left < cutoff) {
        double right = std::min(left + M_PI, cutoff);
        tail += gauss_fixed(
            [&](double x) {
                return angular_average(d, x) * std::exp(-eps * x * x) *
                       std::pow(x, alpha - 1.0);
            },
            left, right, 16);
        left = right;
    }
    return 2.0 * (head + tail);
}

// Psi(eps) with the regime switching described above.
double space_profile(int d, double alpha, double eps, const QuadratureSpec& quad) {
    if (eps >= 1.0) {
        const double cutoff = std::sqrt(45.0 / eps);
        return 2.0 * integrate_power_weight(
                         [&](double x) {
                             return one_minus_angular_average(d, x) * std::exp(-eps * x * x);
                         },
                         cutoff, alpha - 1.0, quad);
    }
    double gaussian_part = std::tgamma(0.5 * alpha) * std::pow(eps, -0.5 * alpha);
    double angular_part = (eps <= 1e-3) ? angular_integral_series(d, alpha, eps)
                                        : angular_integral_quadrature(d, alpha, eps, quad);
    return gaussian_part - angular_part;
}

} // namespace

double chaos1_space_increment_moment(const NoiseModel& model, double t,
                                     std::span<const double> z) {
    require(t > 0.0, "chaos1_space_increment_moment: t must be > 0");
    require(static_cast<int>(z.size()) == model.spatial.dimension,
            "chaos1_space_increment_moment: lag dimension mismatch");
    double zeta2 = 0.0;
    for (double v : z) zeta2 += v * v;
    if (zeta2 == 0.0) return 0.0;
    const double zeta = std::sqrt(zeta2);

    const int d = model.spatial.dimension;
    const double alpha = model.spatial.alpha;
    const double beta = model.temporal.beta;
    const double sphere = model.spatial.sphere_area();
    const double kappa = std::pow(2.0, 2.0 - beta) / (1.0 - beta);
    const double za = std::pow(zeta, -alpha);

    // m in [t/2, t]: substitute u = t - m; the profile's u^(-alpha/2) blowup
    // combines with the vanishing covariance mass into one power weight.
    double near = integrate_power_weight(
        [&](double u) {
            double eps = u / zeta2;
            return kappa * sphere * std::pow(eps, 0.5 * alpha) *
                   space_profile(d, alpha, eps, model.quad);
        },
        0.5 * t, 1.0 - beta - 0.5 * alpha, model.quad);
    // Note pow(eps, alpha/2)*zeta^(-alpha)*u^(...) bookkeeping: the zeta
    // factors cancel against the power weight taken in u.

    // m in [0, t/2]: covariance mass vanishes like m^(1-beta), profile smooth.
    double far = integrate_power_weight(
        [&](double m) {
            double u = t - m;
            return kappa * za * sphere * space_profile(d, alpha, u / zeta2, model.quad);
        },
        0.5 * t, 1.0 - beta, model.quad);

    return near + far;
}

// ---------------------------------------------------------------------------
// Randomly shifted lattice quadrature for the chaos moments.
// ---------------------------------------------------------------------------

namespace {

struct PairSample {
    double t_coord;
    double s_coord;
    double mass;  // covariance mass of the difference variable (Jacobian)
};

// Map two unit coordinates to (t_i, s_i) in [0,t]^2 with the covariance
// singularity |t_i - s_i|^(-beta) absorbed exactly.
PairSample sample_pair(double u_pos, double u_diff, double t, double beta) {
    PairSample p;
    p.t_coord = t * u_pos;
    double lo = gamma_antiderivative(p.t_coord - t, beta);
    double hi = gamma_antiderivative(p.t_coord, beta);
    p.mass = hi - lo;
    double w = gamma_antiderivative_inverse(lo + u_diff * p.mass, beta);
    p.s_coord = std::min(std::max(p.t_coord - w, 0.0), t);
    return p;
}

struct AngleSample {
    double cos_phi;
    double sin_phi;
    double weight;  // 4 |cos sin|^(alpha-1) dphi/drho, stable form
};

// Map one unit coordinate onto [0, pi] with the |cos phi sin phi|^(alpha-1)
// endpoint singularities absorbed by per-quarter power pushes.
AngleSample sample_angle(double u, double alpha) {
    int quarter = std::min(3, static_cast<int>(u * 4.0));
    double rho = u * 4.0 - quarter;
    rho = std::min(std::max(rho, 1e-300), 1.0);
    double delta = 0.25 * M_PI * std::pow(rho, 1.0 / alpha);
    double phi;
    switch (quarter) {
        case 0: phi = delta; break;
        case 1: phi = 0.5 * M_PI - delta; break;
        case 2: phi = 0.5 * M_PI + delta; break;
        default: phi = M_PI - delta; break;
    }
    AngleSample s;
    s.cos_phi = std::cos(phi);
    s.sin_phi = std::sin(phi);
    double sinc_delta = delta == 0.0 ? 1.0 : std::sin(delta) / delta;
    double other = (quarter == 0 || quarter == 3) ? std::abs(s.cos_phi) : std::abs(s.sin_phi);
    s.weight = 4.0 * (0.25 * M_PI / alpha) * std::pow(0.25 * M_PI, alpha - 1.0) *
               std::pow(sinc_delta, alpha - 1.0) * std::pow(other, alpha - 1.0);
    return s;
}

struct LatticeRule {
    std::uint64_t n;
    std::array<std::uint64_t, 5> gen;
};

LatticeRule make_lattice(int log2_points, int dims_used) {
    (void)dims_used;
    LatticeRule rule;
    rule.n = std::uint64_t{1} << log2_points;
    const std::uint64_t a = 100135021ULL;  // odd Korobov multiplier
    rule.gen[0] = 1;
    for (int j = 1; j < 5; ++j) rule.gen[j] = (rule.gen[j - 1] * a) % rule.n;
    return rule;
}

QmcEstimate run_lattice(const std::function<double(const double*)>& f, int dims,
                        std::uint64_t seed, int log2_points, int shifts) {
    require(log2_points >= 6 && log2_points <= 24, "qmc: log2_points out of range");
    require(shifts >= 2 && shifts <= 64, "qmc: need between 2 and 64 shifts");
    LatticeRule rule = make_lattice(log2_points, dims);
    const double inv_n = 1.0 / static_cast<double>(rule.n);

    std::vector<double> shift_means(shifts, 0.0);
    for (int s = 0; s < shifts; ++s) {
        std::array<double, 5> shift{};
        for (int j = 0; j < dims; ++j)
            shift[j] = rng::to_unit(rng::hash3(seed, 0x51ACEuLL + s, j));
        long double acc = 0.0L;
        std::uint64_t bad = 0;
        for (std::uint64_t i = 0; i < rule.n; ++i) {
            double x[5];
            for (int j = 0; j < dims; ++j) {
                double v = std::fmod(static_cast<double>((i * rule.gen[j]) % rule.n) * inv_n +
                                         shift[j],
                                     1.0);
                x[j] = v;
            }
            double val = f(x);
            if (!std::isfinite(val)) {
                ++bad;
                continue;
            }
            acc += val;
        }
        if (bad * 1000 > rule.n)
            throw NumericalError("qmc: too many non-finite integrand evaluations");
        shift_means[s] = static_cast<double>(acc * inv_n);
    }
    QmcEstimate est;
    est.shifts = shifts;
    est.points_per_shift = rule.n;
    for (double v : shift_means) est.value += v;
    est.value /= shifts;
    double ss = 0.0;
    for (double v : shift_means) ss += (v - est.value) * (v - est.value);
    est.std_error = std::sqrt(ss / (shifts * (shifts - 1.0)));
    return est;
}

} // namespace

QmcEstimate chaos2_second_moment_qmc(const NoiseModel& model, double t, std::uint64_t seed,
                                     int log2_points, int shifts) {
    require(model.spatial.dimension == 1,
            "chaos2_second_moment_qmc: exact second-order moments are offered for d = 1 only");
    require(t > 0.0, "chaos2_second_moment_qmc: t must be > 0");
    const double alpha = model.spatial.alpha;
    const double beta = model.temporal.beta;
    const double gamma_alpha = std::tgamma(alpha);

    auto integrand = [&](const double* x) {
        PairSample p1 = sample_pair(x[0], x[1], t, beta);
        PairSample p2 = sample_pair(x[2], x[3], t, beta);
        if (p2.t_coord < p1.t_coord) std::swap(p1, p2);
        // Now p1 holds the earlier time leg.
        double A, B, C;
        if (p1.s_coord < p2.s_coord) {
            A = 0.5 * (p2.t_coord - p1.t_coord + p2.s_coord - p1.s_coord);
            B = 0.0;
            C = 0.5 * (2.0 * t - p2.t_coord - p2.s_coord);
        } else {
            A = 0.5 * (p2.t_coord - p1.t_coord);
            B = 0.5 * (p1.s_coord - p2.s_coord);
            C = 0.5 * (2.0 * t - p2.t_coord - p1.s_coord);
        }
        AngleSample ang = sample_angle(x[4], alpha);
        double cs = ang.cos_phi + ang.sin_phi;
        double q = A * ang.cos_phi * ang.cos_phi + B * ang.sin_phi * ang.sin_phi + C * cs * cs;
        return t * t * p1.mass * p2.mass * gamma_alpha * ang.weight * std::pow(q, -alpha);
    };
    return run_lattice(integrand, 5, seed, log2_points, shifts);
}

QmcEstimate chaos1_second_moment_qmc(const NoiseModel& model, double t, std::uint64_t seed,
                                     int log2_points, int shifts) {
    require(t > 0.0, "chaos1_second_moment_qmc: t must be > 0");
    const double beta = model.temporal.beta;
    auto integrand = [&](const double* x) {
        PairSample p = sample_pair(x[0], x[1], t, beta);
        double arg = t - 0.5 * (p.t_coord + p.s_coord);
        return t * p.mass * propagator_energy(model.spatial, arg);
    };
    return run_lattice(integrand, 2, seed, log2_points, shifts);
}

double chaos_moment_bound(const NoiseModel& model, int n, double t) {
    require(n >= 0, "chaos_moment_bound: order must be >= 0");
    require(t >= 0.0, "chaos_moment_bound: t must be >= 0");
    if (n == 0) return 1.0;
    double mass = covariance_mass(model.temporal, t);
    return std::pow(mass, n) * std::exp(std::lgamma(n + 1.0)) *
           convolution_power(model.spatial, n, t);
}

double solution_second_moment_bound(const NoiseModel& model, double t) {
    return moment_series(model.spatial, t, covariance_mass(model.temporal, t)).value;
}

double solution_p_moment_bound(const NoiseModel& model, double t, double p) {
    require(p >= 2.0, "solution_p_moment_bound: p must be >= 2");
    return moment_series_sqrt(model.spatial, t, (p - 1.0) * covariance_mass(model.temporal, t))
        .value;
}

double chaos1_increment_bound_overlap(const NoiseModel& model, double t, double h,
                                      double eta) {
    require(t > 0.0 && h > 0.0, "chaos1_increment_bound_overlap: t, h must be > 0");
    require(eta > minimal_eta(model.spatial) && eta < 1.0,
            "chaos1_increment_bound_overlap: eta must lie in (alpha/2, 1)");
    const double theta = 1.0 - eta;
    const double c_theta = std::pow(2.0 * theta / M_E, theta);
    double rho_half = weighted_energy_integral(model.spatial, 0.5 * t, theta, model.quad);
    return std::pow(2.0, -theta) * c_theta * std::pow(h, theta) *
           covariance_mass(model.temporal, t) * rho_half;
}

double chaos1_increment_bound_fresh(const NoiseModel& model, double t, double h) {
    require(t >= 0.0 && h > 0.0, "chaos1_increment_bound_fresh: t >= 0 and h > 0 required");
    return covariance_mass(model.temporal, t + h) *
           propagator_energy_mass(model.spatial, h);
}

HolderConstants holder_constants(const NoiseModel& model, double horizon, double p,
                                 double eta) {
    require(horizon > 0.0, "holder_constants: horizon must be > 0");
    require(p >= 2.0, "holder_constants: p must be >= 2");
    require(eta > minimal_eta(model.spatial) && eta < 1.0,
            "holder_constants: eta must lie in (alpha/2, 1)");
    const double theta = 1.0 - eta;
    const double c_theta = std::pow(2.0 * theta / M_E, theta);
    const double k_theta = std::pow(4.0, 1.0 - theta);
    const double mass = covariance_mass(model.temporal, horizon);
    const double rho_half =
        weighted_energy_integral(model.spatial, 0.5 * horizon, theta, model.quad);
    const double rho_full =
        weighted_energy_integral(model.spatial, horizon, theta, model.quad);
    const double series =
        moment_series_sqrt(model.spatial, horizon, (p - 1.0) * mass).value;

    HolderConstants consts;
    consts.time_overlap =
        std::sqrt(std::pow(2.0, -theta) * c_theta * (p - 1.0) * mass * rho_half) * series;
    consts.time_fresh = std::sqrt(rho_full * (p - 1.0) * mass) * series;
    consts.space = std::sqrt(k_theta * c_theta * (p - 1.0) * mass * rho_half) * series;
    return consts;
}

} // namespace pam
