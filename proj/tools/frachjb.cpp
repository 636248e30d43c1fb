// Command-line front end: run a problem file, audit a stored run, or dump the
// expansion coefficients.

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "frachjb/errors.hpp"
#include "frachjb/expansion.hpp"
#include "frachjb/problem_file.hpp"
#include "frachjb/run.hpp"

namespace {

constexpr int kConverged = 0;
constexpr int kError = 1;
constexpr int kNotConverged = 2;

std::string default_path(const std::string& problem, const std::string& suffix) {
    return std::filesystem::path(problem).stem().string() + suffix;
}

int cmd_run(const std::string& file, const std::vector<std::string>& overrides) {
    const frachjb::ProblemSpec spec = frachjb::parse_problem_file(file, overrides);
    const frachjb::RunResult result = frachjb::run_problem(spec);
    const std::string csv = spec.csv_path.empty() ? default_path(file, ".csv") : spec.csv_path;
    const std::string report_path =
        spec.report_path.empty() ? default_path(file, ".report.yaml") : spec.report_path;
    frachjb::write_trajectory_csv(csv, result.state);
    const std::string report = frachjb::format_report(result.report);
    std::ofstream out(report_path);
    if (!out) throw frachjb::ProblemError("cannot write '" + report_path + "'");
    out << report;
    std::cout << report;
    return result.report.converged ? kConverged : kNotConverged;
}

int cmd_verify(const std::string& file, const std::string& csv,
               const std::vector<std::string>& overrides) {
    const frachjb::ProblemSpec spec = frachjb::parse_problem_file(file, overrides);
    const frachjb::TrajectoryTable table = frachjb::read_trajectory_csv(csv, spec);
    const frachjb::HJBProblem prob = frachjb::build_problem(spec);
    std::cout << frachjb::format_verify(frachjb::verify_table(prob, spec, table));
    return 0;
}

int cmd_print_coeffs(double q, std::uint64_t n_a, std::uint64_t n_b, int p_max) {
    frachjb::Truncation trunc{n_a, n_b, p_max, frachjb::BSeries::printed};
    const frachjb::ExpansionCoeffs c = frachjb::ExpansionCoeffs::compute(q, trunc);
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "q" << YAML::Value << q;
    out << YAML::Key << "n_a" << YAML::Value << n_a;
    out << YAML::Key << "n_b" << YAML::Value << n_b;
    out << YAML::Key << "A" << YAML::Value << c.a;
    out << YAML::Key << "B_printed" << YAML::Value << c.b;
    out << YAML::Key << "B_convergent" << YAML::Value
        << frachjb::coeff_B(q, n_b, frachjb::BSeries::convergent);
    out << YAML::Key << "C" << YAML::Value << YAML::BeginSeq;
    for (int p = 2; p <= p_max; ++p) {
        out << YAML::Flow << YAML::BeginSeq << p << c.c_at(p) << YAML::EndSeq;
    }
    out << YAML::EndSeq << YAML::EndMap;
    std::cout << out.c_str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional HJB solver with forward-backward sweeps"};
    app.require_subcommand(1);

    std::string file;
    std::string csv;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "Solve a problem file; write the trajectory CSV and report");
    run->add_option("file", file, "Problem file (YAML)")->required();
    run->add_option("--override", overrides, "Set block.key=value before validation")
        ->allow_extra_args(false);

    auto* verify = app.add_subcommand("verify", "Recompute HJB residuals of a stored run");
    verify->add_option("file", file, "Problem file (YAML)")->required();
    verify->add_option("--csv", csv, "Trajectory CSV written by run")->required();
    verify->add_option("--override", overrides, "Set block.key=value before validation")
        ->allow_extra_args(false);

    double q = 0.0;
    std::uint64_t n_a = 10'000'000;
    std::uint64_t n_b = 10'000'000;
    int p_max = 150;
    auto* coeffs = app.add_subcommand("print-coeffs", "Print A, B and the C table for one order");
    coeffs->add_option("--q", q, "Derivative order in (0, 1)")->required();
    coeffs->add_option("--na", n_a, "Truncation of the A series");
    coeffs->add_option("--nb", n_b, "Truncation of the B series");
    coeffs->add_option("--p-max", p_max, "Last C index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kError;
    }

    try {
        if (*run) return cmd_run(file, overrides);
        if (*verify) return cmd_verify(file, csv, overrides);
        if (*coeffs) return cmd_print_coeffs(q, n_a, n_b, p_max);
    } catch (const frachjb::SolverAbort& e) {
        std::cerr << "frachjb: solver aborted: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "frachjb: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
