#pragma once

// Series expansion of a fractional derivative in terms of x, dx/dt and the
// moment states W_p:
//
//   D^q x(t) = A(q) s^(-q) x + B(q) s^(1-q) x' - sum_{p>=2} C(q,p) s^(1-p-q) W_p(t),
//   W_p' = (1 - p) s^(p-2) x,  W_p(a) = 0,       s = t - a,
//
// and the transformed vector field f~ that turns Caputo dynamics into an
// ordinary differential equation for the augmented state (x, W).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "frachjb/grid.hpp"
#include "frachjb/plant.hpp"

namespace frachjb {

/// Which series is used for B.
///
/// printed:    1 + sum_{p=1}^{N} Gamma(p-1+q) / (Gamma(q) (p-1)!)
/// convergent: 1 + sum_{p=1}^{N} Gamma(p-1+q) / (Gamma(q-1) p!)
///
/// Only the convergent form makes the expansion reproduce D^q x as the
/// truncations grow, and only it tends to 1 as q -> 1. printed is the default.
enum class BSeries { printed, convergent };

struct Truncation {
    std::uint64_t n_a = 10'000'000;
    std::uint64_t n_b = 10'000'000;
    int p_max = 150;
    BSeries b_series = BSeries::printed;
};

/// Truncated A(q, N_A). Summed with the term recurrence
/// term(p+1) = term(p) (p-1+q)/p, carried in extended precision with
/// compensated summation.
double coeff_A(double q, std::uint64_t n_a);

/// Truncated B(q, N_B).
double coeff_B(double q, std::uint64_t n_b, BSeries series = BSeries::printed);

/// C(q, p) = Gamma(p-1+q) / (Gamma(2-q) Gamma(q-1) (p-1)!). Negative on (0, 1).
double coeff_C(double q, int p);

/// A, B and the C table for one order. Immutable once built.
struct ExpansionCoeffs {
    double q = 0.0;
    Truncation truncation;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> c;  // c[p - 2], p = 2..p_max

    /// Builds the table. A and B for a given (q, truncation) are summed once per
    /// process and cached; N = 1e9 takes a few seconds.
    static ExpansionCoeffs compute(double q, const Truncation& truncation);

    double c_at(int p) const { return c[static_cast<std::size_t>(p - 2)]; }
};

/// Moment states W_p for every state component on a grid.
///
/// Values are stored scaled, Y_p = W_p * s^(1-p), which stays O(|x|) while
/// W_p itself spans hundreds of decades for large p. Row layout per node:
/// component-major, p = 2..p_max.
class AuxiliaryStates {
public:
    AuxiliaryStates(TimeGrid grid, std::size_t n_components, int p_max);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t n_components() const noexcept { return n_components_; }
    int p_max() const noexcept { return p_max_; }
    std::size_t count() const noexcept { return static_cast<std::size_t>(p_max_ - 1); }

    /// Scaled states of component i at node k (length p_max - 1).
    std::span<const double> scaled(std::size_t k, std::size_t i) const;
    std::span<double> scaled(std::size_t k, std::size_t i);

    /// Unscaled W_p at node k. May underflow to zero for large p near t0.
    double W(std::size_t k, std::size_t i, int p) const;

    bool operator==(const AuxiliaryStates&) const = default;

private:
    TimeGrid grid_;
    std::size_t n_components_;
    int p_max_;
    std::vector<double> data_;
};

/// Advances W_p from node k to node k+1 for every component and p. x_k and
/// x_next are the states at both ends. The step integrates W_p' =
/// (1-p) s^(p-2) x exactly against the linear interpolant of x, the
/// product-trapezoid rule for this kernel; the classical trapezoid rule is
/// off by O(1) for large p on early intervals, where s^(p-2) varies by many
/// orders of magnitude across one step.
void advance_W(AuxiliaryStates& states, std::size_t k, std::span<const double> x_k,
               std::span<const double> x_next);

/// Same step written into a caller-owned buffer laid out like one node row;
/// used for the predictor stage of the forward sweep.
void advance_W_into(const AuxiliaryStates& states, std::size_t k, std::span<const double> x_k,
                    std::span<const double> x_next, std::span<double> out);

/// Re-integrates all moment states along a complete state trajectory.
AuxiliaryStates integrate_W(const TimeGrid& grid, const Trajectory& x, int p_max);

/// k_i(t) = -x_i(a) s^(-q)/Gamma(1-q) + A s^(-q) x_i - sum_p C(q,p) s^(1-p-q) W_p
/// with the sum truncated at p_max. scaled_W holds Y_p for this component.
/// Throws SingularPoint for s <= 0.
double correction_k(double s, double x_i, double x_i_initial, const ExpansionCoeffs& coeffs,
                     std::span<const double> scaled_W);

/// The transformed field f~ for a plant: component i is
/// (f_i - k_i) / (B(q_i) s^(1-q_i)).
class TransformedField {
public:
    /// t0 is the lower terminal a of the Caputo derivatives.
    TransformedField(FractionalPlant plant, const Truncation& truncation, double t0 = 0.0);

    const FractionalPlant& plant() const noexcept { return plant_; }
    const ExpansionCoeffs& coeffs(std::size_t i) const { return coeffs_[i]; }
    const Truncation& truncation() const noexcept { return truncation_; }
    double t0() const noexcept { return t0_; }

    /// f~ at time t with the scaled moment states of one node (row layout as in
    /// AuxiliaryStates). Throws SingularPoint at t <= t0.
    void evaluate(double t, std::span<const double> x, std::span<const double> scaled_row,
                  std::span<const double> u, std::span<double> out) const;

private:
    FractionalPlant plant_;
    Truncation truncation_;
    double t0_;
    std::vector<ExpansionCoeffs> coeffs_;
    std::vector<double> inv_gamma_one_minus_q_;
};

/// Free-function form of TransformedField::evaluate reading W from node k.
std::vector<double> f_tilde(const TransformedField& field, const AuxiliaryStates& states,
                            std::size_t k, double t, std::span<const double> x,
                            std::span<const double> u);

}  // namespace frachjb
