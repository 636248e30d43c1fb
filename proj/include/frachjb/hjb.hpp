#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "frachjb/cost.hpp"
#include "frachjb/expansion.hpp"
#include "frachjb/grid.hpp"

namespace frachjb {

/// Box bounds per control component. Infinite bounds are allowed only when the
/// Hamiltonian is declared quadratic in u.
struct ControlBox {
    std::vector<double> lower;
    std::vector<double> upper;

    static ControlBox unbounded(std::size_t m);
    std::size_t size() const noexcept { return lower.size(); }
};

class HJBProblem {
public:
    /// quadratic_control declares the Hamiltonian quadratic and separable in u,
    /// which enables the closed-form minimizer.
    HJBProblem(TransformedField field, PerformanceIndex index, ControlBox controls, double t0,
               double tf, bool quadratic_control = false);

    const FractionalPlant& plant() const noexcept { return field_.plant(); }
    const TransformedField& field() const noexcept { return field_; }
    const PerformanceIndex& index() const noexcept { return index_; }
    const ControlBox& controls() const noexcept { return controls_; }
    double t0() const noexcept { return t0_; }
    double tf() const noexcept { return tf_; }
    bool quadratic_control() const noexcept { return quadratic_; }
    std::size_t n_states() const noexcept { return plant().n_states(); }
    std::size_t n_controls() const noexcept { return plant().n_controls(); }

private:
    TransformedField field_;
    PerformanceIndex index_;
    ControlBox controls_;
    double t0_;
    double tf_;
    bool quadratic_;
};

/// Where the pieces of the Hamiltonian are evaluated at one node. The running
/// cost uses (t, x); its weights use t_weight; f~ uses (t_field, x_field,
/// w_row). Interior nodes have all three equal to the node itself. At t0,
/// where f~ is singular, f~ is taken at the next node; at tf, where weights of
/// order below one are singular, weights are taken at the previous node.
struct NodePoint {
    double t;
    std::span<const double> x;
    double t_weight;
    double t_field;
    std::span<const double> x_field;
    std::span<const double> w_row;  // scaled moment states, AuxiliaryStates row layout
};

/// Copies the moment states of node k into one contiguous row.
std::vector<double> moment_row(const AuxiliaryStates& states, std::size_t k);

/// Sum of weighted running costs plus V_x . f~.
double hamiltonian(const HJBProblem& prob, const NodePoint& at, std::span<const double> u,
                   std::span<const double> V_x);

/// Same with every piece at (t, x, w_row).
double hamiltonian(const HJBProblem& prob, double t, std::span<const double> x,
                   std::span<const double> w_row, std::span<const double> u,
                   std::span<const double> V_x);

struct Minimizer {
    std::vector<double> u;
    double h;
};

/// Box-constrained minimizer of the Hamiltonian. Closed form clipped to the
/// box when the problem is declared quadratic, golden-section coordinate
/// descent to 1e-10 otherwise. hint seeds the search and is returned for
/// components the Hamiltonian does not depend on. Non-finite values throw
/// SolverAbort carrying node.
Minimizer minimize_hamiltonian(const HJBProblem& prob, const NodePoint& at,
                               std::span<const double> V_x, std::span<const double> hint,
                               std::size_t node = 0);

/// Value along a trajectory with its gradient (the costate).
struct ValueData {
    std::vector<double> V;
    Trajectory V_x;
};

/// The evaluation point the solver uses at node k. row receives the moment
/// states the point refers to and must outlive it.
NodePoint node_point(const TimeGrid& grid, const Trajectory& x, const AuxiliaryStates& W,
                     std::size_t k, std::vector<double>& row);

/// Residual of the HJB equation at node k:
///   min_u H + V_t,  V_t = (V_{k+1} - V_k)/dt - V_x . f~(u_k)
/// for k < n_steps (the partial time derivative recovered from the total
/// difference along the trajectory), and V_N - terminal_value(x_N) at the
/// final node. If minimum is non-null it receives the minimizer.
double hjb_residual(const HJBProblem& prob, const TimeGrid& grid, const ValueData& value,
                    const Trajectory& x, const Trajectory& u, const AuxiliaryStates& W,
                    std::size_t k, Minimizer* minimum = nullptr);

/// Root-sum-square of the residuals.
double aggregate_error(std::span<const double> residuals);

}  // namespace frachjb
