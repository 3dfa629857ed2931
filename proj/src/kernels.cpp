#include "pam/kernels.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace pam {

double propagator_energy(const SpatialSpectralModel& model, double t) {
    require(t > 0.0, "propagator_energy: t must be > 0");
    return model.gaussian_constant() * std::pow(t, -0.5 * model.alpha);
}

double propagator_energy_quadrature(const SpatialSpectralModel& model, double t,
                                    const QuadratureSpec& quad) {
    require(t > 0.0, "propagator_energy_quadrature: t must be > 0");
    const double r_max = std::sqrt(45.0 / t);
    return spectral_radial_integral(
        model, [t](double r) { return std::exp(-t * r * r); }, r_max, quad);
}

double propagator_energy_mass(const SpatialSpectralModel& model, double h) {
    require(h >= 0.0, "propagator_energy_mass: h must be >= 0");
    const double p = 1.0 - 0.5 * model.alpha;
    return model.gaussian_constant() * std::pow(h, p) / p;
}

double convolution_power(const SpatialSpectralModel& model, int n, double t) {
    require(n >= 0, "convolution_power: order must be >= 0");
    require(t >= 0.0, "convolution_power: t must be >= 0");
    if (n == 0) return 1.0;
    if (t == 0.0) return 0.0;
    const double p = 1.0 - 0.5 * model.alpha;
    const double log_term = n * (std::log(model.gaussian_constant()) + std::lgamma(p)) +
                            n * p * std::log(t) - std::lgamma(n * p + 1.0);
    return std::exp(log_term);
}

namespace {

// Log-log linear interpolation of strictly positive node values; exact for
// pure powers, which is what the Riesz chain produces at every order.
struct PowerProfileInterp {
    const std::vector<double>* values;  // node values h(s_j), j = 0..n (s_0 = 0)
    double step;
    double first_exponent;  // local exponent nu on the first cell

    double operator()(double s) const {
        const std::vector<double>& h = *values;
        if (s <= 0.0) return first_exponent == 0.0 ? h[0] : 0.0;
        double idx = s / step;
        size_t j = std::min(static_cast<size_t>(idx), h.size() - 2);
        if (j == 0) {
            double base = h[1];
            return base * std::pow(s / step, first_exponent);
        }
        double s0 = j * step, s1 = (j + 1) * step;
        double lam = (std::log(s) - std::log(s0)) / (std::log(s1) - std::log(s0));
        return std::exp((1.0 - lam) * std::log(h[j]) + lam * std::log(h[j + 1]));
    }
};

} // namespace

KernelTable build_kernel_table(const SpatialSpectralModel& model, int n_max, double horizon,
                               int n_grid, const QuadratureSpec& quad) {
    require(n_max >= 1, "build_kernel_table: n_max must be >= 1");
    require(n_max <= 20, "build_kernel_table: n_max > 20 rejected");
    require(horizon > 0.0, "build_kernel_table: horizon must be > 0");
    require(n_grid >= 8, "build_kernel_table: n_grid must be >= 8");
    quad.validate();

    KernelTable table;
    table.model = model;
    table.quad = quad;
    table.horizon = horizon;
    table.n_grid = n_grid;
    table.n_max = n_max;

    const double dt = horizon / n_grid;
    const double a = 0.5 * model.alpha;
    const double c = model.gaussian_constant();

    table.times.resize(n_grid);
    table.k_values.resize(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        table.times[i] = (i + 1) * dt;
        table.k_values[i] = propagator_energy(model, table.times[i]);
    }

    // h values stored with a leading node at t = 0.
    std::vector<std::vector<double>> h(n_max + 1, std::vector<double>(n_grid + 1, 0.0));
    std::fill(h[0].begin(), h[0].end(), 1.0);

    const int cell_nodes = 8;
    for (int order = 1; order <= n_max; ++order) {
        const double nu = (order - 1) * (1.0 - a);
        PowerProfileInterp prev{&h[order - 1], dt, nu};
        const double beta_first = std::exp(std::lgamma(nu + 1.0) + std::lgamma(1.0 - a) -
                                           std::lgamma(nu + 2.0 - a));
        for (int i = 1; i <= n_grid; ++i) {
            const double t = i * dt;
            double acc = 0.0;
            if (i == 1) {
                // Single cell with both a vanishing profile and the weight
                // singularity: Beta-type closed integral of the profile.
                acc = h[order - 1][1] * c * std::pow(t, 1.0 - a) * beta_first;
            } else {
                // First cell: profile (s/dt)^nu against the smooth weight.
                acc += std::pow(dt, -nu) *
                       integrate_power_weight(
                           [&](double s) {
                               return h[order - 1][1] * c * std::pow(t - s, -a);
                           },
                           dt, nu, quad);
                // Interior cells: smooth weight, fixed Gauss panels.
                for (int j = 1; j < i - 1; ++j) {
                    acc += gauss_fixed(
                        [&](double s) { return prev(s) * c * std::pow(t - s, -a); }, j * dt,
                        (j + 1) * dt, cell_nodes);
                }
                // Last cell: weight singularity absorbed exactly.
                acc += c * integrate_power_weight(
                               [&](double v) { return prev(t - v); }, dt, -a, quad);
            }
            h[order][i] = acc;
        }
    }

    table.h_values.assign(n_max + 1, std::vector<double>(n_grid, 0.0));
    for (int order = 0; order <= n_max; ++order)
        for (int i = 0; i < n_grid; ++i) table.h_values[order][i] = h[order][i + 1];
    return table;
}

std::string kernel_table_csv(const KernelTable& table, bool include_selftest) {
    std::ostringstream out;
    out << "t,k";
    for (int n = 1; n <= table.n_max; ++n) out << ",h" << n;
    out << "\n";
    char buf[40];
    auto put = [&](double v, bool lead_comma) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        if (lead_comma) out << ',';
        out << buf;
    };
    for (int i = 0; i < table.n_grid; ++i) {
        put(table.times[i], false);
        put(table.k_values[i], true);
        for (int n = 1; n <= table.n_max; ++n) put(table.h_values[n][i], true);
        out << "\n";
    }
    if (include_selftest) {
        double worst_k = 0.0, worst_h = 0.0;
        for (int i = table.n_grid / 4; i < table.n_grid; i += std::max(1, table.n_grid / 4)) {
            double t = table.times[i];
            double kq = propagator_energy_quadrature(table.model, t, table.quad);
            worst_k = std::max(worst_k, std::abs(kq / table.k_values[i] - 1.0));
            for (int n = 1; n <= std::min(table.n_max, 5); ++n) {
                double ref = convolution_power(table.model, n, t);
                worst_h = std::max(worst_h, std::abs(table.h_values[n][i] / ref - 1.0));
            }
        }
        std::snprintf(buf, sizeof(buf), "%.3g", worst_k);
        out << "# selftest max_rel_err_k=" << buf;
        std::snprintf(buf, sizeof(buf), "%.3g", worst_h);
        out << " max_rel_err_h=" << buf << "\n";
    }
    return out.str();
}

namespace {

SeriesValue sum_series(const SpatialSpectralModel& model, double t, double weight, double tol,
                       bool sqrt_terms) {
    require(t >= 0.0, "moment_series: t must be >= 0");
    require(weight >= 0.0, "moment_series: weight must be >= 0");
    require(tol > 0.0, "moment_series: tol must be > 0");
    SeriesValue result;
    if (t == 0.0 || weight == 0.0) {
        result.value = 1.0;
        result.truncation_index = 0;
        return result;
    }
    const int cap = 4096;
    const double p = 1.0 - 0.5 * model.alpha;
    const double log_weight = std::log(weight);
    const double log_base = std::log(model.gaussian_constant()) + std::lgamma(p) +
                            p * std::log(t);
    long double sum = 0.0L;
    double prev_term = 0.0;
    int decays = 0;
    for (int n = 0; n <= cap; ++n) {
        double log_term = n * (log_weight + log_base) - std::lgamma(n * p + 1.0);
        if (sqrt_terms) log_term *= 0.5;
        double term = std::exp(log_term);
        if (!std::isfinite(term))
            throw NumericalError("moment_series: term overflow before truncation");
        sum += term;
        if (n > 0) decays = (term < prev_term * 0.5) ? decays + 1 : 0;
        prev_term = term;
        if (n >= 3 && decays >= 3 && term < tol * static_cast<double>(sum)) {
            result.value = static_cast<double>(sum);
            result.truncation_index = n;
            return result;
        }
    }
    throw NumericalError("moment_series: terms failed to decay within the order cap");
}

} // namespace

SeriesValue moment_series(const SpatialSpectralModel& model, double t, double weight,
                          double tol) {
    return sum_series(model, t, weight, tol, false);
}

SeriesValue moment_series_sqrt(const SpatialSpectralModel& model, double t, double weight,
                               double tol) {
    return sum_series(model, t, weight, tol, true);
}

double holder_energy_integral(const SpatialSpectralModel& model, double eta,
                              const QuadratureSpec& quad) {
    require(eta > 0.0 && eta < 1.0, "holder_energy_integral: eta must lie in (0,1)");
    const double a = 0.5 * model.alpha;
    if (eta <= a) return kInfiniteIntegral;
    // Integrand k(s) s^(eta-1) with known power exponent eta-1-a at 0.
    const double p = eta - 1.0 - a;
    return integrate_power_weight(
        [&](double s) { return propagator_energy(model, s) * std::pow(s, a); }, 1.0, p, quad);
}

double weighted_energy_integral(const SpatialSpectralModel& model, double t, double theta,
                                const QuadratureSpec& quad) {
    require(t >= 0.0, "weighted_energy_integral: t must be >= 0");
    const double a = 0.5 * model.alpha;
    require(theta + a < 1.0,
            "weighted_energy_integral: divergent, requires theta < 1 - alpha/2");
    if (t == 0.0) return 0.0;
    return integrate_power_weight(
        [&](double s) { return propagator_energy(model, s) * std::pow(s, a); }, t, -theta - a,
        quad);
}

} // namespace pam
