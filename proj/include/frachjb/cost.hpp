#pragma once

// Generalized performance index
//
//   J = sum_j  (1/Gamma(v_j)) int_t^tf (tf - tau)^(v_j - 1) g_j(tau, x, u) dtau
//       + sum_{k : v_k = 0} g_k(tf, x(tf)).

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "frachjb/grid.hpp"

namespace frachjb {

using RunningOperand =
    std::function<double(double t, std::span<const double> x, std::span<const double> u)>;
using TerminalOperand = std::function<double(double tf, std::span<const double> x)>;

/// One operator/operand pair of the index. Order 0 means a terminal term.
class CostTerm {
public:
    /// v in (0, 2].
    static CostTerm running(double v, RunningOperand g);
    static CostTerm terminal(TerminalOperand h);

    double order() const noexcept { return v_; }
    bool is_terminal() const noexcept { return v_ == 0.0; }

    double running_value(double t, std::span<const double> x, std::span<const double> u) const;
    double terminal_value(double tf, std::span<const double> x) const;

private:
    CostTerm() = default;

    double v_ = 0.0;
    RunningOperand running_;
    TerminalOperand terminal_;
};

class PerformanceIndex {
public:
    explicit PerformanceIndex(std::vector<CostTerm> terms);

    std::span<const CostTerm> terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

private:
    std::vector<CostTerm> terms_;
};

/// Zero-based indices of the terms of order zero.
std::vector<std::size_t> terminal_index_set(const PerformanceIndex& pi);

/// Sum of the terminal operands; 0 when there are none.
double terminal_value(const PerformanceIndex& pi, double tf, std::span<const double> x_tf);

/// (tf - t)^(v-1) / Gamma(v). At t = tf the weight is 1 for v = 1 and 0 for
/// v > 1; for v < 1 it is unbounded and SingularPoint is thrown.
double running_weight(double v, double t, double tf);

/// Weighted running cost sum_j running_weight(v_j, t_weight, tf) g_j(t, x, u).
/// The weights may be taken at a different time than the operands, which is
/// how the solver sidesteps the singular weight at tf.
double weighted_running_cost(const PerformanceIndex& pi, double t, double t_weight, double tf,
                             std::span<const double> x, std::span<const double> u);

/// Cost-to-go from node from_node: product-trapezoid quadrature of each
/// running term over [t, tf] plus the terminal value. x and u must cover the
/// whole grid.
double evaluate(const PerformanceIndex& pi, const TimeGrid& grid, const Trajectory& x,
                const Trajectory& u, std::size_t from_node = 0);

}  // namespace frachjb
