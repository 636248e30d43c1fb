#include "frachjb/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frachjb/errors.hpp"

namespace frachjb {
namespace {

constexpr double kControlTol = 1e-10;
constexpr int kMaxCoordinateSweeps = 200;

class HamiltonianFn {
public:
    HamiltonianFn(const HJBProblem& prob, const NodePoint& at, std::span<const double> V_x,
                  std::size_t node)
        : prob_(prob), at_(at), V_x_(V_x), node_(node), f_(prob.n_states()) {}

    double operator()(std::span<const double> u) {
        const double h = hamiltonian_into(u);
        if (!std::isfinite(h)) {
            throw SolverAbort("non-finite Hamiltonian during control search", node_);
        }
        return h;
    }

private:
    double hamiltonian_into(std::span<const double> u) {
        double h = weighted_running_cost(prob_.index(), at_.t, at_.t_weight, prob_.tf(), at_.x, u);
        prob_.field().evaluate(at_.t_field, at_.x_field, at_.w_row, u, f_);
        for (std::size_t i = 0; i < f_.size(); ++i) h += V_x_[i] * f_[i];
        return h;
    }

    const HJBProblem& prob_;
    const NodePoint& at_;
    std::span<const double> V_x_;
    std::size_t node_;
    std::vector<double> f_;
};

// Exact minimum of a quadratic in one component, found from three probes.
void quadratic_component(HamiltonianFn& H, std::vector<double>& u, std::size_t c, double lo,
                         double hi, std::size_t node) {
    const double keep = u[c];
    u[c] = 0.0;
    const double h0 = H(u);
    u[c] = 1.0;
    const double hp = H(u);
    u[c] = -1.0;
    const double hm = H(u);
    const double a = 0.5 * (hp + hm - 2.0 * h0);
    const double b = 0.5 * (hp - hm);
    const double scale = std::max({std::abs(h0), std::abs(hp), std::abs(hm), 1.0});
    if (a > 1e-14 * scale) {
        u[c] = std::clamp(-b / (2.0 * a), lo, hi);
        return;
    }
    if (std::abs(b) <= 1e-14 * scale) {
        u[c] = std::clamp(keep, lo, hi);
        return;
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw SolverAbort("Hamiltonian unbounded below in an unbounded control", node);
    }
    u[c] = lo;
    const double h_lo = H(u);
    u[c] = hi;
    const double h_hi = H(u);
    u[c] = h_lo <= h_hi ? lo : hi;
}

// Golden-section search in one component; the endpoints and the starting
// value are also candidates, so a boundary minimum is never missed.
void golden_component(HamiltonianFn& H, std::vector<double>& u, std::size_t c, double lo,
                      double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double start = std::clamp(u[c], lo, hi);
    auto eval = [&](double v) {
        u[c] = v;
        return H(u);
    };
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (b - a > kControlTol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
    }
    // The starting value wins ties, so a flat direction keeps the hint.
    double best = start;
    double f_best = eval(start);
    for (double cand : {f1 <= f2 ? x1 : x2, lo, hi}) {
        const double f = eval(cand);
        if (f < f_best) {
            f_best = f;
            best = cand;
        }
    }
    u[c] = best;
}

}  // namespace

ControlBox ControlBox::unbounded(std::size_t m) {
    const double inf = std::numeric_limits<double>::infinity();
    return {std::vector<double>(m, -inf), std::vector<double>(m, inf)};
}

HJBProblem::HJBProblem(TransformedField field, PerformanceIndex index, ControlBox controls,
                       double t0, double tf, bool quadratic_control)
    : field_(std::move(field)),
      index_(std::move(index)),
      controls_(std::move(controls)),
      t0_(t0),
      tf_(tf),
      quadratic_(quadratic_control) {
    const std::size_t m = plant().n_controls();
    if (controls_.lower.size() != m || controls_.upper.size() != m) {
        throw DimensionError("HJB problem: control bounds must have " + std::to_string(m) +
                             " components");
    }
    for (std::size_t c = 0; c < m; ++c) {
        if (!(controls_.lower[c] <= controls_.upper[c])) {
            throw DomainError("HJB problem: control " + std::to_string(c + 1) +
                              " has lower bound above upper bound");
        }
        if (!quadratic_ && !(std::isfinite(controls_.lower[c]) && std::isfinite(controls_.upper[c]))) {
            throw DomainError("HJB problem: control " + std::to_string(c + 1) +
                              " needs finite bounds unless the Hamiltonian is declared quadratic");
        }
    }
    if (!(tf_ > t0_)) throw DomainError("HJB problem: tf must exceed t0");
    if (field_.t0() != t0_) throw DomainError("HJB problem: field and horizon disagree on t0");
}

std::vector<double> moment_row(const AuxiliaryStates& states, std::size_t k) {
    const std::size_t n = states.n_components();
    const std::size_t m = states.count();
    std::vector<double> row(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = states.scaled(k, i);
        std::copy(src.begin(), src.end(), row.begin() + static_cast<std::ptrdiff_t>(i * m));
    }
    return row;
}

double hamiltonian(const HJBProblem& prob, const NodePoint& at, std::span<const double> u,
                   std::span<const double> V_x) {
    if (V_x.size() != prob.n_states() || u.size() != prob.n_controls()) {
        throw DimensionError("hamiltonian: costate or control size mismatch");
    }
    double h = weighted_running_cost(prob.index(), at.t, at.t_weight, prob.tf(), at.x, u);
    std::vector<double> f(prob.n_states());
    prob.field().evaluate(at.t_field, at.x_field, at.w_row, u, f);
    for (std::size_t i = 0; i < f.size(); ++i) h += V_x[i] * f[i];
    return h;
}

double hamiltonian(const HJBProblem& prob, double t, std::span<const double> x,
                   std::span<const double> w_row, std::span<const double> u,
                   std::span<const double> V_x) {
    return hamiltonian(prob, NodePoint{t, x, t, t, x, w_row}, u, V_x);
}

Minimizer minimize_hamiltonian(const HJBProblem& prob, const NodePoint& at,
                               std::span<const double> V_x, std::span<const double> hint,
                               std::size_t node) {
    const std::size_t m = prob.n_controls();
    if (hint.size() != m || V_x.size() != prob.n_states()) {
        throw DimensionError("minimize_hamiltonian: hint or costate size mismatch");
    }
    const ControlBox& box = prob.controls();
    HamiltonianFn H(prob, at, V_x, node);
    std::vector<double> u(hint.begin(), hint.end());
    for (std::size_t c = 0; c < m; ++c) u[c] = std::clamp(u[c], box.lower[c], box.upper[c]);

    if (prob.quadratic_control()) {
        for (std::size_t c = 0; c < m; ++c) quadratic_component(H, u, c, box.lower[c], box.upper[c], node);
    } else {
        for (int sweep = 0; sweep < kMaxCoordinateSweeps; ++sweep) {
            double moved = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                const double before = u[c];
                golden_component(H, u, c, box.lower[c], box.upper[c]);
                moved = std::max(moved, std::abs(u[c] - before));
            }
            if (m == 1 || moved <= kControlTol) break;
        }
    }
    const double h = H(u);
    return {std::move(u), h};
}

NodePoint node_point(const TimeGrid& grid, const Trajectory& x, const AuxiliaryStates& W,
                     std::size_t k, std::vector<double>& row) {
    const std::size_t last = grid.n_steps();
    if (k > last) throw DimensionError("node_point: node outside grid");
    const std::size_t field_node = k == 0 ? 1 : k;
    const std::size_t weight_node = k == last ? last - 1 : k;
    row = moment_row(W, field_node);
    return NodePoint{grid.node(k),          x.row(k), grid.node(weight_node),
                     grid.node(field_node), x.row(field_node), row};
}

double hjb_residual(const HJBProblem& prob, const TimeGrid& grid, const ValueData& value,
                    const Trajectory& x, const Trajectory& u, const AuxiliaryStates& W,
                    std::size_t k, Minimizer* minimum) {
    const std::size_t last = grid.n_steps();
    if (value.V.size() != grid.n_nodes() || value.V_x.n_nodes() != grid.n_nodes()) {
        throw DimensionError("hjb_residual: value data does not cover the grid");
    }
    std::vector<double> row;
    const NodePoint at = node_point(grid, x, W, k, row);
    Minimizer best = minimize_hamiltonian(prob, at, value.V_x.row(k), u.row(k), k);
    double r;
    if (k == last) {
        r = value.V[last] - terminal_value(prob.index(), grid.tf(), x.row(last));
    } else {
        std::vector<double> f(prob.n_states());
        prob.field().evaluate(at.t_field, at.x_field, at.w_row, u.row(k), f);
        double lambda_f = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) lambda_f += value.V_x.at(k, i) * f[i];
        const double V_t = (value.V[k + 1] - value.V[k]) / grid.dt() - lambda_f;
        r = best.h + V_t;
    }
    if (minimum) *minimum = std::move(best);
    return r;
}

double aggregate_error(std::span<const double> residuals) {
    double sum = 0.0;
    for (double r : residuals) sum += r * r;
    return std::sqrt(sum);
}

}  // namespace frachjb
