#include "pam/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace pam {

namespace {

GaussRule make_gauss_rule(int n) {
    // Newton iteration on Legendre polynomials; nodes symmetric about 0.
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_rule(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
    return it->second;
}

double gauss_fixed(const Integrand& f, double a, double b, int n) {
    const GaussRule& rule = gauss_rule(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

namespace {

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment evaluate_segment(const Integrand& f, double a, double b, int n) {
    double coarse = gauss_fixed(f, a, b, n);
    double fine = gauss_fixed(f, a, 0.5 * (a + b), n) + gauss_fixed(f, 0.5 * (a + b), b, n);
    return Segment{a, b, fine, std::abs(fine - coarse)};
}

} // namespace

double integrate_adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    if (a == b) return 0.0;
    const int n = std::clamp(spec.node_count / 4, 8, 48);
    const int max_segments = 4000;

    std::priority_queue<Segment> heap;
    heap.push(evaluate_segment(f, a, b, n));
    double total = heap.top().value;
    double total_err = heap.top().error;
    int count = 1;
    while (total_err > spec.abs_tol && total_err > spec.rel_tol * std::abs(total)) {
        if (count >= max_segments)
            throw NumericalError("integrate_adaptive: tolerance not met within interval budget");
        Segment worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.error;
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw NumericalError("integrate_adaptive: interval collapsed before convergence");
        Segment left = evaluate_segment(f, worst.a, mid, n);
        Segment right = evaluate_segment(f, mid, worst.b, n);
        total += left.value + right.value;
        total_err += left.error + right.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    if (!std::isfinite(total))
        throw NumericalError("integrate_adaptive: non-finite integral value");
    return total;
}

double integrate_power_weight(const Integrand& g, double L, double p, const QuadratureSpec& spec) {
    require(p > -1.0, "integrate_power_weight: exponent must be > -1");
    require(L >= 0.0, "integrate_power_weight: upper limit must be >= 0");
    if (L == 0.0) return 0.0;
    const double q = 1.0 + p;
    const double inv_q = 1.0 / q;
    // The substituted variable can underflow for p near -1; integrands are
    // continuous on (0, L], so pin it to the smallest positive normal.
    const double floor_v = std::numeric_limits<double>::min();
    auto transformed = [&](double tau) { return g(std::max(std::pow(tau, inv_q), floor_v)); };
    return inv_q * integrate_adaptive(transformed, 0.0, std::pow(L, q), spec);
}

double integrate_left_power(const Integrand& g, double a, double b, double p,
                            const QuadratureSpec& spec) {
    auto shifted = [&](double v) { return g(a + v); };
    return integrate_power_weight(shifted, b - a, p, spec);
}

double integrate_right_power(const Integrand& g, double a, double b, double p,
                             const QuadratureSpec& spec) {
    auto reflected = [&](double v) { return g(b - v); };
    return integrate_power_weight(reflected, b - a, p, spec);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    require(std::abs(denom) > 0.0, "fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

} // namespace pam
