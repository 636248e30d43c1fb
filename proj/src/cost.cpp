#include "frachjb/cost.hpp"

#include <cmath>
#include <string>

#include "frachjb/errors.hpp"
#include "frachjb/fracnum.hpp"
#include "frachjb/special.hpp"

namespace frachjb {

CostTerm CostTerm::running(double v, RunningOperand g) {
    if (!(v > 0.0 && v <= 2.0)) {
        throw DomainError("cost term: running order must lie in (0, 2], got " + std::to_string(v));
    }
    if (!g) throw DomainError("cost term: empty operand");
    CostTerm term;
    term.v_ = v;
    term.running_ = std::move(g);
    return term;
}

CostTerm CostTerm::terminal(TerminalOperand h) {
    if (!h) throw DomainError("cost term: empty operand");
    CostTerm term;
    term.terminal_ = std::move(h);
    return term;
}

double CostTerm::running_value(double t, std::span<const double> x,
                               std::span<const double> u) const {
    if (is_terminal()) throw DomainError("cost term: terminal term has no running operand");
    return running_(t, x, u);
}

double CostTerm::terminal_value(double tf, std::span<const double> x) const {
    if (!is_terminal()) throw DomainError("cost term: running term has no terminal operand");
    return terminal_(tf, x);
}

PerformanceIndex::PerformanceIndex(std::vector<CostTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw DomainError("performance index: at least one term is required");
}

std::vector<std::size_t> terminal_index_set(const PerformanceIndex& pi) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < pi.size(); ++j) {
        if (pi.terms()[j].is_terminal()) out.push_back(j);
    }
    return out;
}

double terminal_value(const PerformanceIndex& pi, double tf, std::span<const double> x_tf) {
    double sum = 0.0;
    for (const CostTerm& term : pi.terms()) {
        if (term.is_terminal()) sum += term.terminal_value(tf, x_tf);
    }
    return sum;
}

double running_weight(double v, double t, double tf) {
    if (!(v > 0.0 && v <= 2.0)) {
        throw DomainError("running weight: order must lie in (0, 2], got " + std::to_string(v));
    }
    if (t > tf) throw DomainError("running weight: t beyond tf");
    if (t == tf) {
        if (v < 1.0) throw SingularPoint("running weight: (tf - t)^(v-1) unbounded at t = tf");
        return v == 1.0 ? 1.0 : 0.0;
    }
    if (v == 1.0) return 1.0;
    return std::pow(tf - t, v - 1.0) / gamma(v);
}

double weighted_running_cost(const PerformanceIndex& pi, double t, double t_weight, double tf,
                             std::span<const double> x, std::span<const double> u) {
    double sum = 0.0;
    for (const CostTerm& term : pi.terms()) {
        if (term.is_terminal()) continue;
        sum += running_weight(term.order(), t_weight, tf) * term.running_value(t, x, u);
    }
    return sum;
}

double evaluate(const PerformanceIndex& pi, const TimeGrid& grid, const Trajectory& x,
                const Trajectory& u, std::size_t from_node) {
    const std::size_t n = grid.n_nodes();
    if (x.n_nodes() != n || u.n_nodes() != n) {
        throw DimensionError("cost evaluate: trajectories must cover all " + std::to_string(n) +
                             " grid nodes");
    }
    if (from_node >= n) throw DimensionError("cost evaluate: start node outside grid");
    const std::size_t m = n - 1 - from_node;
    double total = terminal_value(pi, grid.tf(), x.row(n - 1));
    if (m == 0) return total;
    for (const CostTerm& term : pi.terms()) {
        if (term.is_terminal()) continue;
        // The kernel (tf - tau)^(v-1) over [t_k, tf] is the left kernel with
        // its base at tf, so weight j pairs with node from_node + j.
        const std::vector<double> w = kernel_weights(m, term.order(), grid.dt());
        for (std::size_t j = 0; j <= m; ++j) {
            const std::size_t k = from_node + j;
            total += w[j] * term.running_value(grid.node(k), x.row(k), u.row(k));
        }
    }
    return total;
}

}  // namespace frachjb
