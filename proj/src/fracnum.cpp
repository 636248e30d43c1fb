#include "frachjb/fracnum.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "frachjb/errors.hpp"
#include "frachjb/special.hpp"

namespace frachjb {
namespace {

void check_integral_order(double v) {
    if (!(v > 0.0 && v <= 2.0)) {
        throw DomainError("fractional integral: order must lie in (0, 2], got " + std::to_string(v));
    }
}

void check_derivative_order(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("fractional derivative: order must lie in (0, 1), got " +
                          std::to_string(q));
    }
}

void check_node(const SampledFunction& f, std::size_t node) {
    if (node >= f.size()) {
        throw DimensionError("node " + std::to_string(node) + " outside grid of " +
                             std::to_string(f.size()) + " nodes");
    }
}

// (k+1)^a - 2 k^a + (k-1)^a for k >= 1, written as
// k^a [((1+1/k)^a - 1) + ((1-1/k)^a - 1)] to halve the cancellation.
double second_difference_pow(double k, double a) {
    if (k < 2.0) return std::pow(k + 1.0, a) - 2.0 * std::pow(k, a) + std::pow(k - 1.0, a);
    const double up = std::expm1(a * std::log1p(1.0 / k));
    const double down = std::expm1(a * std::log1p(-1.0 / k));
    return std::pow(k, a) * (up + down);
}

}  // namespace

std::vector<double> kernel_weights(std::size_t m, double v, double h) {
    check_integral_order(v);
    std::vector<double> w(m + 1, 0.0);
    if (m == 0) return w;
    const double a = v + 1.0;
    const double scale = std::pow(h, v) / gamma(v + 2.0);
    const double md = static_cast<double>(m);
    w[0] = scale * (std::pow(md - 1.0, a) - (md - 1.0 - v) * std::pow(md, v));
    for (std::size_t j = 1; j < m; ++j) {
        w[j] = scale * second_difference_pow(static_cast<double>(m - j), a);
    }
    w[m] = scale;
    return w;
}

double rl_integral_left(const SampledFunction& f, double v, std::size_t upper_node) {
    check_integral_order(v);
    check_node(f, upper_node);
    const std::vector<double> w = kernel_weights(upper_node, v, f.grid().dt());
    double sum = 0.0;
    for (std::size_t j = 0; j <= upper_node; ++j) sum += w[j] * f[j];
    return sum;
}

double rl_integral_right(const SampledFunction& f, double v, std::size_t lower_node) {
    check_integral_order(v);
    check_node(f, lower_node);
    const std::size_t last = f.size() - 1;
    const std::size_t m = last - lower_node;
    // s = tf - tau maps the right kernel (tau - t_lower)^(v-1) onto (m h - s)^(v-1).
    const std::vector<double> w = kernel_weights(m, v, f.grid().dt());
    double sum = 0.0;
    for (std::size_t j = 0; j <= m; ++j) sum += w[j] * f[last - j];
    return sum;
}

double caputo_derivative(const SampledFunction& f, double q, std::size_t node) {
    check_derivative_order(q);
    check_node(f, node);
    if (node == 0) return 0.0;
    const double a = 1.0 - q;
    double sum = 0.0;
    for (std::size_t j = 0; j < node; ++j) {
        const double m = static_cast<double>(node - 1 - j);
        const double b = std::pow(m + 1.0, a) - std::pow(m, a);
        sum += b * (f[j + 1] - f[j]);
    }
    return sum * std::pow(f.grid().dt(), -q) / gamma(2.0 - q);
}

double rl_derivative(const SampledFunction& f, double q, std::size_t node) {
    const double caputo = caputo_derivative(f, q, node);
    const double initial = f[0];
    if (initial == 0.0) return caputo;
    if (node == 0) {
        return std::copysign(std::numeric_limits<double>::infinity(), initial);
    }
    const double elapsed = f.grid().node(node) - f.grid().t0();
    return caputo + initial * std::pow(elapsed, -q) / gamma(1.0 - q);
}

}  // namespace frachjb
