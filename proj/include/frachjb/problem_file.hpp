#pragma once

// Problem files: YAML with four blocks.
//
//   plant:   orders, initial_state, controls, dynamics (one expression per state)
//   cost:    list of {order, operand}; order 0 marks a terminal operand
//   solver:  t0, tf, dt, u_init, n_a, n_b, p_max, b_series, max_iters,
//            error_tol, relaxation, control_bounds, quadratic_control
//   output:  csv, report
//
// Unknown keys are rejected. Errors name the offending field and, when the
// value came from a file, its line and column.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frachjb/expansion.hpp"
#include "frachjb/fbsm.hpp"
#include "frachjb/hjb.hpp"

namespace frachjb {

class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CostTermSpec {
    double order = 0.0;
    std::string operand;

    bool operator==(const CostTermSpec&) const = default;
};

struct ProblemSpec {
    // plant
    std::vector<double> orders;
    std::vector<double> initial_state;
    std::size_t n_controls = 1;
    std::vector<std::string> dynamics;
    // cost
    std::vector<CostTermSpec> cost;
    // solver
    double t0 = 0.0;
    double tf = 1.0;
    double dt = 0.01;
    std::vector<double> u_init;
    std::uint64_t n_a = 10'000'000;
    std::uint64_t n_b = 10'000'000;
    int p_max = 150;
    BSeries b_series = BSeries::printed;
    int max_iters = 200;
    double error_tol = 1e-8;
    double relaxation = 0.5;
    std::vector<double> control_lower;
    std::vector<double> control_upper;
    bool quadratic_control = false;
    // output
    std::string csv_path;
    std::string report_path;

    bool operator==(const ProblemSpec&) const = default;

    Truncation truncation() const { return {n_a, n_b, p_max, b_series}; }
};

/// Parses and validates YAML text. overrides are "block.key=value" strings
/// applied before validation; value is read as YAML.
ProblemSpec parse_problem_text(const std::string& text,
                               const std::vector<std::string>& overrides = {});
ProblemSpec parse_problem_file(const std::string& path,
                               const std::vector<std::string>& overrides = {});

/// Serialises a spec so that parsing the output gives back an equal spec.
std::string write_problem(const ProblemSpec& spec);

/// Builds the solver objects. Summing the expansion series happens here.
HJBProblem build_problem(const ProblemSpec& spec);
SweepConfig build_config(const ProblemSpec& spec);

}  // namespace frachjb
