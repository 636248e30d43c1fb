#pragma once

#include <cstddef>
#include <vector>

#include "frachjb/grid.hpp"

namespace frachjb {

/// Product-trapezoid weights for the weakly singular kernel.
///
/// For samples f_j = f(j*h), j = 0..m, returns w such that
///
///     (1/Gamma(v)) * int_0^{m h} (m h - s)^(v-1) f(s) ds  ~=  sum_j w_j f_j
///
/// with f replaced by its piecewise-linear interpolant and the kernel moments
/// integrated exactly on every subinterval. No kernel evaluation happens at
/// s = m h, so the rule is safe for 0 < v < 1. For v = 1 it is the
/// composite trapezoid rule.
std::vector<double> kernel_weights(std::size_t m, double v, double h);

/// Left Riemann-Liouville integral of order v over [t0, t_upper].
double rl_integral_left(const SampledFunction& f, double v, std::size_t upper_node);

/// Right Riemann-Liouville integral of order v over [t_lower, tf].
double rl_integral_right(const SampledFunction& f, double v, std::size_t lower_node);

/// Caputo derivative of order q in (0, 1) at a node, L1 scheme: f' is the
/// difference quotient on each subinterval, kernel moments are exact.
/// O(dt^(2-q)) for smooth f.
double caputo_derivative(const SampledFunction& f, double q, std::size_t node);

/// Riemann-Liouville derivative of order q in (0, 1), obtained from the Caputo
/// value plus the initial-value term f(t0) (t - t0)^(-q) / Gamma(1 - q).
/// At node 0 with f(t0) != 0 that term is unbounded and the result is an
/// infinity carrying the sign of f(t0).
double rl_derivative(const SampledFunction& f, double q, std::size_t node);

}  // namespace frachjb
