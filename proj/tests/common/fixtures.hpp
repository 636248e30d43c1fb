#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "frachjb/cost.hpp"
#include "frachjb/expansion.hpp"
#include "frachjb/fbsm.hpp"
#include "frachjb/hjb.hpp"
#include "frachjb/plant.hpp"

namespace fixtures {

// D^0.2 x1 = x2 + u, D^0.7 x2 = -x1, x(0) = (1, 0.5);
// cost I^0.3 (x1^2 + x2^2) + I^0.4 (x1^2 + u^2) on [0, 1].
inline frachjb::FractionalPlant two_state_plant(double q1 = 0.2, double q2 = 0.7) {
    return frachjb::FractionalPlant(
        {q1, q2}, {1.0, 0.5}, 1,
        [](double, std::span<const double> x, std::span<const double> u, std::span<double> out) {
            out[0] = x[1] + u[0];
            out[1] = -x[0];
        });
}

inline frachjb::PerformanceIndex two_state_index() {
    using frachjb::CostTerm;
    std::vector<CostTerm> terms;
    terms.push_back(CostTerm::running(0.3, [](double, std::span<const double> x, std::span<const double>) {
        return x[0] * x[0] + x[1] * x[1];
    }));
    terms.push_back(CostTerm::running(0.4, [](double, std::span<const double> x, std::span<const double> u) {
        return x[0] * x[0] + u[0] * u[0];
    }));
    return frachjb::PerformanceIndex(std::move(terms));
}

inline frachjb::HJBProblem two_state_problem(const frachjb::Truncation& trunc,
                                             bool quadratic = true) {
    return frachjb::HJBProblem(frachjb::TransformedField(two_state_plant(), trunc, 0.0),
                               two_state_index(), frachjb::ControlBox{{-50.0}, {50.0}}, 0.0, 1.0,
                               quadratic);
}

inline frachjb::SweepConfig two_state_config(double dt = 0.01) {
    frachjb::SweepConfig cfg;
    cfg.dt = dt;
    cfg.u_init = {5.0};
    cfg.max_iters = 200;
    cfg.error_tol = 1e-8;
    cfg.relaxation = 0.5;
    return cfg;
}

// Two-state problem at the truncations used by the fast suites, solved once
// per process and shared between test cases.
inline const frachjb::HJBProblem& two_state_fast_problem() {
    static const auto prob =
        two_state_problem(frachjb::Truncation{10'000'000, 10'000'000, 150, frachjb::BSeries::printed});
    return prob;
}

inline const frachjb::SweepState& two_state_solution() {
    static const auto state = frachjb::solve(two_state_fast_problem(), two_state_config());
    return state;
}

// Scalar linear-quadratic problem  D^q x = a x + b u,  x(0) = x0,
// J = h x(T)^2 + int_0^T (Q x^2 + R u^2) dt.
struct LQ {
    double q = 0.999;
    double a = -0.5;
    double b = 1.0;
    double x0 = 1.0;
    double T = 1.0;
    double h = 1.0;
    double Q = 1.0;
    double R = 1.0;
};

inline frachjb::HJBProblem lq_problem(const LQ& lq, const frachjb::Truncation& trunc) {
    using frachjb::CostTerm;
    frachjb::FractionalPlant plant(
        {lq.q}, {lq.x0}, 1,
        [lq](double, std::span<const double> x, std::span<const double> u, std::span<double> out) {
            out[0] = lq.a * x[0] + lq.b * u[0];
        });
    std::vector<CostTerm> terms;
    terms.push_back(CostTerm::terminal(
        [lq](double, std::span<const double> x) { return lq.h * x[0] * x[0]; }));
    terms.push_back(CostTerm::running(1.0, [lq](double, std::span<const double> x, std::span<const double> u) {
        return lq.Q * x[0] * x[0] + lq.R * u[0] * u[0];
    }));
    return frachjb::HJBProblem(frachjb::TransformedField(std::move(plant), trunc, 0.0),
                               frachjb::PerformanceIndex(std::move(terms)),
                               frachjb::ControlBox::unbounded(1), 0.0, lq.T, true);
}

// Classical optimal cost P(0) x0^2 from the Riccati equation
//   -P' = 2 a P + Q - P^2 b^2 / R,  P(T) = h,
// integrated backward with classical RK4 on a fine grid.
inline double riccati_cost(const LQ& lq, int steps = 100000) {
    auto rhs = [&](double P) { return -(2.0 * lq.a * P + lq.Q - P * P * lq.b * lq.b / lq.R); };
    const double h = lq.T / steps;
    double P = lq.h;
    for (int k = 0; k < steps; ++k) {
        // integrate in reversed time s = T - t: dP/ds = -dP/dt
        const double k1 = -rhs(P);
        const double k2 = -rhs(P + 0.5 * h * k1);
        const double k3 = -rhs(P + 0.5 * h * k2);
        const double k4 = -rhs(P + h * k3);
        P += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return P * lq.x0 * lq.x0;
}

}  // namespace fixtures
