#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "frachjb/expansion.hpp"
#include "frachjb/grid.hpp"
#include "frachjb/hjb.hpp"

namespace frachjb {

struct SweepConfig {
    double dt = 0.01;
    /// Constant initial control, one value per component.
    std::vector<double> u_init;
    /// Optional per-node initial control; overrides u_init when set.
    std::optional<Trajectory> u_init_nodes;
    int max_iters = 200;
    double error_tol = 1e-8;
    /// Blend factor for u <- theta u_new + (1 - theta) u_old.
    double relaxation = 0.5;

    void validate(std::size_t n_controls) const;
};

struct ForwardResult {
    Trajectory x;
    AuxiliaryStates W;
};

/// Integrates the transformed dynamics with Heun's method from t0 to tf.
/// The first interval, where f~ is singular, is an explicit fractional Euler
/// step of the Caputo dynamics; W follows x by the product-trapezoid step.
ForwardResult forward_sweep(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& u);

/// Value and costate along the trajectory. V is the cost-to-go,
/// V_k = V_{k+1} + dt L(t_k, x_k, u_k), from V_N = terminal_value; the costate
/// solves lambda' = -(dL/dx + (df~/dx)^T lambda) backward with Heun from the
/// gradient of the terminal value. Derivatives are central differences with
/// step 1e-6 max(1, |x_i|).
ValueData backward_sweep(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& x,
                         const AuxiliaryStates& W, const Trajectory& u);

/// Residuals at every node with the pointwise Hamiltonian minimizers.
struct ResidualData {
    std::vector<double> residuals;
    Trajectory minimizers;
    double error = 0.0;
};

ResidualData residuals(const HJBProblem& prob, const TimeGrid& grid, const ValueData& value,
                       const Trajectory& x, const Trajectory& u, const AuxiliaryStates& W);

/// Pointwise Hamiltonian minimizers blended with u_old by theta.
Trajectory update_control(const HJBProblem& prob, const TimeGrid& grid, const Trajectory& x,
                          const AuxiliaryStates& W, const ValueData& value,
                          const Trajectory& u_old, double theta);

struct SweepState {
    TimeGrid grid;
    int iteration = 0;
    Trajectory u;
    Trajectory x;
    AuxiliaryStates W;
    ValueData value;
    std::vector<double> residuals;
    Trajectory minimizers;
    double error = 0.0;
    std::vector<double> error_history;
    bool converged = false;
    bool stagnated = false;

    /// Optimal cost, V at (t0, x0).
    double J_star() const { return value.V.front(); }
};

/// One forward/backward/residual pass for a given control.
SweepState sweep(const HJBProblem& prob, const TimeGrid& grid, Trajectory u);

/// The initial control trajectory the config describes.
Trajectory initial_control(const SweepConfig& cfg, const TimeGrid& grid, std::size_t n_controls);

/// Forward-backward sweep iteration. An update is accepted only if the
/// aggregate error does not increase; otherwise theta is halved, up to 20
/// times, after which the run stops flagged as stagnated. Never throws on
/// non-convergence; the returned state is the last accepted iterate.
SweepState solve(const HJBProblem& prob, const SweepConfig& cfg);

}  // namespace frachjb
