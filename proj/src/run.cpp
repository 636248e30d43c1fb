#include "frachjb/run.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "frachjb/errors.hpp"

namespace frachjb {
namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> header(std::size_t n, std::size_t m) {
    std::vector<std::string> h{"t"};
    for (std::size_t i = 1; i <= n; ++i) h.push_back("x" + std::to_string(i));
    for (std::size_t c = 1; c <= m; ++c) h.push_back("u" + std::to_string(c));
    h.push_back("V");
    h.push_back("error");
    return h;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

RunResult run_problem(const ProblemSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    const HJBProblem prob = build_problem(spec);
    SweepState state = solve(prob, build_config(spec));
    const auto stop = std::chrono::steady_clock::now();

    RunReport report;
    report.J_star = state.J_star();
    const auto last = state.x.row(state.x.n_nodes() - 1);
    report.terminal_state.assign(last.begin(), last.end());
    report.error = state.error;
    report.iterations = state.iteration;
    report.converged = state.converged;
    report.stagnated = state.stagnated;
    report.wall_time = std::chrono::duration<double>(stop - start).count();
    return {std::move(report), std::move(state)};
}

std::string format_report(const RunReport& report) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "J_star" << YAML::Value << report.J_star;
    out << YAML::Key << "terminal_state" << YAML::Value << YAML::Flow << report.terminal_state;
    out << YAML::Key << "error" << YAML::Value << report.error;
    out << YAML::Key << "iterations" << YAML::Value << report.iterations;
    out << YAML::Key << "converged" << YAML::Value << report.converged;
    out << YAML::Key << "stagnated" << YAML::Value << report.stagnated;
    out.SetDoublePrecision(6);
    out << YAML::Key << "wall_time_s" << YAML::Value << report.wall_time;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string trajectory_csv(const SweepState& state) {
    const std::size_t n = state.x.dim();
    const std::size_t m = state.u.dim();
    std::string text;
    const auto h = header(n, m);
    for (std::size_t i = 0; i < h.size(); ++i) text += (i ? "," : "") + h[i];
    text += '\n';
    for (std::size_t k = 0; k < state.grid.n_nodes(); ++k) {
        text += fmt17(state.grid.node(k));
        for (std::size_t i = 0; i < n; ++i) text += "," + fmt17(state.x.at(k, i));
        for (std::size_t c = 0; c < m; ++c) text += "," + fmt17(state.u.at(k, c));
        text += "," + fmt17(state.value.V[k]);
        text += "," + fmt17(state.residuals[k]);
        text += '\n';
    }
    return text;
}

void write_trajectory_csv(const std::string& path, const SweepState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ProblemError("cannot write '" + path + "'");
    out << trajectory_csv(state);
    if (!out) throw ProblemError("error writing '" + path + "'");
}

TrajectoryTable read_trajectory_csv(const std::string& path, const ProblemSpec& spec) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open trajectory file '" + path + "'");
    const std::size_t n = spec.orders.size();
    const std::size_t m = spec.n_controls;
    const TimeGrid grid(spec.t0, spec.tf, spec.dt);

    std::string line;
    if (!std::getline(in, line)) throw ProblemError(path + ": empty file");
    const auto expected = header(n, m);
    if (split(line) != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
        throw ProblemError(path + ": header does not match the problem, expected '" + want + "'");
    }
    TrajectoryTable table{{}, Trajectory(grid.n_nodes(), n), Trajectory(grid.n_nodes(), m), {}, {}};
    std::size_t k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        const std::size_t lineno = k + 2;
        if (cells.size() != expected.size()) {
            throw ProblemError(path + ": line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(expected.size()));
        }
        if (k >= grid.n_nodes()) {
            throw ProblemError(path + ": more rows than the " + std::to_string(grid.n_nodes()) +
                               " grid nodes of the problem");
        }
        std::vector<double> v(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            char* end = nullptr;
            v[j] = std::strtod(cells[j].c_str(), &end);
            if (cells[j].empty() || *end != '\0') {
                throw ProblemError(path + ": line " + std::to_string(lineno) + ", column '" +
                                   expected[j] + "': not a number");
            }
        }
        if (std::abs(v[0] - grid.node(k)) > 1e-12 * std::max(1.0, std::abs(grid.node(k)))) {
            throw ProblemError(path + ": line " + std::to_string(lineno) + ": t = " + cells[0] +
                               " does not match grid node " + fmt17(grid.node(k)));
        }
        table.t.push_back(v[0]);
        for (std::size_t i = 0; i < n; ++i) table.x.at(k, i) = v[1 + i];
        for (std::size_t c = 0; c < m; ++c) table.u.at(k, c) = v[1 + n + c];
        table.V.push_back(v[1 + n + m]);
        table.error.push_back(v[2 + n + m]);
        ++k;
    }
    if (k != grid.n_nodes()) {
        throw ProblemError(path + ": " + std::to_string(k) + " rows, the problem grid has " +
                           std::to_string(grid.n_nodes()) + " nodes");
    }
    return table;
}

VerifyReport verify_table(const HJBProblem& prob, const ProblemSpec& spec,
                          const TrajectoryTable& table) {
    const TimeGrid grid(spec.t0, spec.tf, spec.dt);
    const AuxiliaryStates W = integrate_W(grid, table.x, spec.p_max);
    ValueData value = backward_sweep(prob, grid, table.x, W, table.u);
    value.V = table.V;
    const ResidualData res = residuals(prob, grid, value, table.x, table.u, W);
    VerifyReport report{res.residuals, res.error, 0.0};
    for (std::size_t k = 0; k < res.residuals.size(); ++k) {
        report.max_stored_difference =
            std::max(report.max_stored_difference, std::abs(res.residuals[k] - table.error[k]));
    }
    return report;
}

std::string format_verify(const VerifyReport& report) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "error" << YAML::Value << report.error;
    out << YAML::Key << "nodes" << YAML::Value << report.residuals.size();
    out << YAML::Key << "max_stored_difference" << YAML::Value << report.max_stored_difference;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace frachjb
