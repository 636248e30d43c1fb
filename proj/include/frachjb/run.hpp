#pragma once

#include <string>
#include <vector>

#include "frachjb/fbsm.hpp"
#include "frachjb/problem_file.hpp"

namespace frachjb {

struct RunReport {
    double J_star = 0.0;
    std::vector<double> terminal_state;
    double error = 0.0;
    int iterations = 0;
    bool converged = false;
    bool stagnated = false;
    double wall_time = 0.0;  // seconds, coefficient summation included
};

struct RunResult {
    RunReport report;
    SweepState state;
};

/// Builds and solves the problem.
RunResult run_problem(const ProblemSpec& spec);

/// Report as YAML text.
std::string format_report(const RunReport& report);

/// Per-node table with header t, x1..xn, u1..um, V, error; values carry 17
/// significant digits so that reading them back is exact.
void write_trajectory_csv(const std::string& path, const SweepState& state);
std::string trajectory_csv(const SweepState& state);

struct TrajectoryTable {
    std::vector<double> t;
    Trajectory x;
    Trajectory u;
    std::vector<double> V;
    std::vector<double> error;
};

/// Reads a table written by write_trajectory_csv and checks its columns and
/// time nodes against the problem. Throws ProblemError on any mismatch.
TrajectoryTable read_trajectory_csv(const std::string& path, const ProblemSpec& spec);

struct VerifyReport {
    std::vector<double> residuals;
    double error = 0.0;
    /// Largest difference between recomputed and stored per-node errors.
    double max_stored_difference = 0.0;
};

/// Recomputes the HJB residuals of a stored run from the table alone: the
/// moment states are re-integrated from x, the costate is re-solved, and V is
/// taken from the table.
VerifyReport verify_table(const HJBProblem& prob, const ProblemSpec& spec,
                          const TrajectoryTable& table);

std::string format_verify(const VerifyReport& report);

}  // namespace frachjb
