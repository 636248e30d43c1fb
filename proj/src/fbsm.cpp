#include "frachjb/fbsm.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "frachjb/errors.hpp"
#include "frachjb/special.hpp"

namespace frachjb {
namespace {

constexpr int kMaxHalvings = 20;
constexpr double kFdStep = 1e-6;

void check_finite(std::span<const double> v, const char* what, std::size_t node) {
    for (double d : v) {
        if (!std::isfinite(d)) throw SolverAbort(std::string("non-finite ") + what, node);
    }
}

double fd_step(double x) { return kFdStep * std::max(1.0, std::abs(x)); }

// Linearisation of the running cost and f~ at one node, moment states fixed.
struct Linearisation {
    std::vector<double> grad_L;    // n
    std::vector<double> jacobian;  // n x n, row-major: d f~_i / d x_j
};

Linearisation linearise(const HJBProblem& prob, const NodePoint& at, std::span<const double> u) {
    const std::size_t n = prob.n_states();
    Linearisation lin{std::vector<double>(n), std::vector<double>(n * n)};
    std::vector<double> xp(at.x.begin(), at.x.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double h = fd_step(at.x[j]);
        xp[j] = at.x[j] + h;
        const double up = weighted_running_cost(prob.index(), at.t, at.t_weight, prob.tf(), xp, u);
        xp[j] = at.x[j] - h;
        const double down = weighted_running_cost(prob.index(), at.t, at.t_weight, prob.tf(), xp, u);
        xp[j] = at.x[j];
        lin.grad_L[j] = (up - down) / (2.0 * h);
    }
    std::vector<double> xf(at.x_field.begin(), at.x_field.end());
    std::vector<double> fp(n);
    std::vector<double> fm(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = fd_step(at.x_field[j]);
        xf[j] = at.x_field[j] + h;
        prob.field().evaluate(at.t_field, xf, at.w_row, u, fp);
        xf[j] = at.x_field[j] - h;
        prob.field().evaluate(at.t_field, xf, at.w_row, u, fm);
        xf[j] = at.x_field[j];
        for (std::size_t i = 0; i < n; ++i) lin.jacobian[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    return lin;
}

// lambda' = -(grad L + J^T lambda)
std::vector<double> costate_rate(const Linearisation& lin, std::span<const double> lambda) {
    const std::size_t n = lambda.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = lin.grad_L[j];
        for (std::size_t i = 0; i < n; ++i) s += lin.jacobian[i * n + j] * lambda[i];
        out[j] = -s;
    }
    return out;
}

std::vector<double> terminal_gradient(const HJBProblem& prob, double tf, std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> g(n, 0.0);
    if (terminal_index_set(prob.index()).empty()) return g;
    std::vector<double> xp(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double h = fd_step(x[j]);
        xp[j] = x[j] + h;
        const double up = terminal_value(prob.index(), tf, xp);
        xp[j] = x[j] - h;
        const double down = terminal_value(prob.index(), tf, xp);
        xp[j] = x[j];
        g[j] = (up - down) / (2.0 * h);
    }
    return g;
}

void check_control(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& u) {
    if (u.n_nodes() != grid.n_nodes() || u.dim() != prob.n_controls()) {
        throw DimensionError("control trajectory must have " + std::to_string(grid.n_nodes()) +
                             " nodes of dimension " + std::to_string(prob.n_controls()));
    }
}

}  // namespace

void SweepConfig::validate(std::size_t n_controls) const {
    if (!(dt > 0.0)) throw DomainError("solver.dt must be positive");
    if (!(error_tol > 0.0)) throw DomainError("solver.error_tol must be positive");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) {
        throw DomainError("solver.relaxation must lie in (0, 1]");
    }
    if (max_iters < 0) throw DomainError("solver.max_iters must be non-negative");
    if (u_init_nodes) {
        if (u_init_nodes->dim() != n_controls) throw DimensionError("solver.u_init: wrong dimension");
    } else if (u_init.size() != n_controls) {
        throw DimensionError("solver.u_init must have " + std::to_string(n_controls) +
                             " components");
    }
}

ForwardResult forward_sweep(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& u) {
    check_control(prob, grid, u);
    const FractionalPlant& plant = prob.plant();
    const std::size_t n = plant.n_states();
    const int p_max = prob.field().truncation().p_max;
    const double dt = grid.dt();
    ForwardResult out{Trajectory(grid.n_nodes(), n), AuxiliaryStates(grid, n, p_max)};
    Trajectory& x = out.x;
    AuxiliaryStates& W = out.W;

    const auto x0 = plant.initial_state();
    std::copy(x0.begin(), x0.end(), x.row(0).begin());
    std::vector<double> f(n);
    plant.dynamics(grid.node(0), x.row(0), u.row(0), f);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = plant.orders()[i];
        x.at(1, i) = x0[i] + std::pow(dt, q) / gamma(q + 1.0) * f[i];
    }
    check_finite(x.row(1), "state", 1);
    advance_W(W, 0, x.row(0), x.row(1));

    std::vector<double> x_pred(n);
    std::vector<double> f_pred(n);
    std::vector<double> w_pred(n * W.count());
    for (std::size_t k = 1; k < grid.n_steps(); ++k) {
        const std::vector<double> row = moment_row(W, k);
        prob.field().evaluate(grid.node(k), x.row(k), row, u.row(k), f);
        for (std::size_t i = 0; i < n; ++i) x_pred[i] = x.at(k, i) + dt * f[i];
        advance_W_into(W, k, x.row(k), x_pred, w_pred);
        prob.field().evaluate(grid.node(k + 1), x_pred, w_pred, u.row(k + 1), f_pred);
        for (std::size_t i = 0; i < n; ++i) x.at(k + 1, i) = x.at(k, i) + 0.5 * dt * (f[i] + f_pred[i]);
        check_finite(x.row(k + 1), "state", k + 1);
        advance_W(W, k, x.row(k), x.row(k + 1));
    }
    return out;
}

ValueData backward_sweep(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& x,
                         const AuxiliaryStates& W, const Trajectory& u) {
    check_control(prob, grid, u);
    const std::size_t n = prob.n_states();
    const std::size_t last = grid.n_steps();
    const double dt = grid.dt();
    ValueData value{std::vector<double>(grid.n_nodes()), Trajectory(grid.n_nodes(), n)};

    value.V[last] = terminal_value(prob.index(), grid.tf(), x.row(last));
    for (std::size_t k = last; k-- > 0;) {
        const double t = grid.node(k);
        value.V[k] = value.V[k + 1] +
                     dt * weighted_running_cost(prob.index(), t, t, grid.tf(), x.row(k), u.row(k));
        if (!std::isfinite(value.V[k])) throw SolverAbort("non-finite value function", k);
    }

    const std::vector<double> lambda_N = terminal_gradient(prob, grid.tf(), x.row(last));
    std::copy(lambda_N.begin(), lambda_N.end(), value.V_x.row(last).begin());
    check_finite(value.V_x.row(last), "costate", last);

    std::vector<double> row;
    NodePoint at = node_point(grid, x, W, last, row);
    Linearisation lin_next = linearise(prob, at, u.row(last));
    std::vector<double> pred(n);
    for (std::size_t k = last; k-- > 0;) {
        const auto lambda_next = value.V_x.row(k + 1);
        const std::vector<double> rate_next = costate_rate(lin_next, lambda_next);
        for (std::size_t i = 0; i < n; ++i) pred[i] = lambda_next[i] - dt * rate_next[i];
        at = node_point(grid, x, W, k, row);
        Linearisation lin = linearise(prob, at, u.row(k));
        const std::vector<double> rate = costate_rate(lin, pred);
        for (std::size_t i = 0; i < n; ++i) {
            value.V_x.at(k, i) = lambda_next[i] - 0.5 * dt * (rate_next[i] + rate[i]);
        }
        check_finite(value.V_x.row(k), "costate", k);
        lin_next = std::move(lin);
    }
    return value;
}

ResidualData residuals(const HJBProblem& prob, const TimeGrid& grid, const ValueData& value,
                       const Trajectory& x, const Trajectory& u, const AuxiliaryStates& W) {
    ResidualData out{std::vector<double>(grid.n_nodes()),
                     Trajectory(grid.n_nodes(), prob.n_controls()), 0.0};
    Minimizer best;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        out.residuals[k] = hjb_residual(prob, grid, value, x, u, W, k, &best);
        std::copy(best.u.begin(), best.u.end(), out.minimizers.row(k).begin());
    }
    out.error = aggregate_error(out.residuals);
    return out;
}

Trajectory update_control(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& x,
                          const AuxiliaryStates& W, const ValueData& value,
                          const Trajectory& u_old, double theta) {
    check_control(prob, grid, u_old);
    Trajectory u_new(grid.n_nodes(), prob.n_controls());
    std::vector<double> row;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        const NodePoint at = node_point(grid, x, W, k, row);
        const Minimizer best = minimize_hamiltonian(prob, at, value.V_x.row(k), u_old.row(k), k);
        for (std::size_t c = 0; c < prob.n_controls(); ++c) {
            u_new.at(k, c) = theta * best.u[c] + (1.0 - theta) * u_old.at(k, c);
        }
    }
    return u_new;
}

SweepState sweep(const HJBProblem& prob, const TimeGrid& grid, Trajectory u) {
    ForwardResult fwd = forward_sweep(prob, grid, u);
    ValueData value = backward_sweep(prob, grid, fwd.x, fwd.W, u);
    ResidualData res = residuals(prob, grid, value, fwd.x, u, fwd.W);
    SweepState state{grid,
                     0,
                     std::move(u),
                     std::move(fwd.x),
                     std::move(fwd.W),
                     std::move(value),
                     std::move(res.residuals),
                     std::move(res.minimizers),
                     res.error,
                     {},
                     false,
                     false};
    return state;
}

Trajectory initial_control(const SweepConfig& cfg, const TimeGrid& grid, std::size_t n_controls) {
    cfg.validate(n_controls);
    if (cfg.u_init_nodes) {
        if (cfg.u_init_nodes->n_nodes() != grid.n_nodes()) {
            throw DimensionError("solver.u_init: per-node control does not match the grid");
        }
        return *cfg.u_init_nodes;
    }
    Trajectory u(grid.n_nodes(), n_controls);
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        for (std::size_t c = 0; c < n_controls; ++c) u.at(k, c) = cfg.u_init[c];
    }
    return u;
}

SweepState solve(const HJBProblem& prob, const SweepConfig& cfg) {
    const TimeGrid grid(prob.t0(), prob.tf(), cfg.dt);
    if (grid.n_steps() < 2) throw DomainError("solver.dt leaves fewer than two steps");
    SweepState state = sweep(prob, grid, initial_control(cfg, grid, prob.n_controls()));
    state.error_history.push_back(state.error);

    for (int it = 1; it <= cfg.max_iters; ++it) {
        double theta = cfg.relaxation;
        bool accepted = false;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, theta *= 0.5) {
            Trajectory u_try(grid.n_nodes(), prob.n_controls());
            for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
                for (std::size_t c = 0; c < prob.n_controls(); ++c) {
                    u_try.at(k, c) =
                        theta * state.minimizers.at(k, c) + (1.0 - theta) * state.u.at(k, c);
                }
            }
            std::optional<SweepState> trial;
            try {
                trial.emplace(sweep(prob, grid, std::move(u_try)));
            } catch (const SolverAbort&) {
                continue;
            }
            if (trial->error <= state.error) {
                trial->error_history = std::move(state.error_history);
                trial->error_history.push_back(trial->error);
                trial->iteration = it;
                state = std::move(*trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            state.stagnated = true;
            break;
        }
        if (state.error <= cfg.error_tol) {
            state.converged = true;
            break;
        }
    }
    return state;
}

}  // namespace frachjb
