#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "frachjb/errors.hpp"
#include "frachjb/expansion.hpp"
#include "frachjb/fracnum.hpp"
#include "frachjb/problem_file.hpp"
#include "frachjb/run.hpp"
#include "frachjb/special.hpp"

namespace py = pybind11;
using namespace frachjb;

namespace {

BSeries series_from(const std::string& name) {
    if (name == "printed") return BSeries::printed;
    if (name == "convergent") return BSeries::convergent;
    throw py::value_error("b_series must be 'printed' or 'convergent'");
}

SampledFunction samples(const std::vector<double>& values, double dt, double t0) {
    if (values.size() < 2) throw py::value_error("need at least two samples");
    const double tf = t0 + dt * static_cast<double>(values.size() - 1);
    return SampledFunction(TimeGrid(t0, tf, dt), values);
}

std::vector<std::vector<double>> rows(const Trajectory& tr) {
    std::vector<std::vector<double>> out(tr.n_nodes());
    for (std::size_t k = 0; k < tr.n_nodes(); ++k) out[k].assign(tr.row(k).begin(), tr.row(k).end());
    return out;
}

py::dict report_dict(const RunReport& r) {
    py::dict d;
    d["J_star"] = r.J_star;
    d["terminal_state"] = r.terminal_state;
    d["error"] = r.error;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["stagnated"] = r.stagnated;
    d["wall_time"] = r.wall_time;
    return d;
}

}  // namespace

PYBIND11_MODULE(_frachjb, m) {
    m.doc() = "Fractional HJB solver core";

    py::register_exception<ProblemError>(m, "ProblemError", PyExc_ValueError);
    py::register_exception<SolverAbort>(m, "SolverAbort", PyExc_RuntimeError);

    m.def("gamma", static_cast<double (*)(double)>(&frachjb::gamma), py::arg("x"));
    m.def(
        "log_gamma",
        [](double x) {
            const auto r = log_gamma(x);
            return py::make_tuple(r.log_abs, r.sign);
        },
        py::arg("x"), "Returns (log|Gamma(x)|, sign).");

    m.def("coeff_A", &coeff_A, py::arg("q"), py::arg("n_a"));
    m.def(
        "coeff_B", [](double q, std::uint64_t n, const std::string& s) { return coeff_B(q, n, series_from(s)); },
        py::arg("q"), py::arg("n_b"), py::arg("b_series") = "printed");
    m.def("coeff_C", &coeff_C, py::arg("q"), py::arg("p"));

    m.def(
        "rl_integral_left",
        [](const std::vector<double>& f, double v, double dt, double t0) {
            return rl_integral_left(samples(f, dt, t0), v, f.size() - 1);
        },
        py::arg("samples"), py::arg("v"), py::arg("dt"), py::arg("t0") = 0.0,
        "Left integral of order v over the whole sample range.");
    m.def(
        "rl_integral_right",
        [](const std::vector<double>& f, double v, double dt, double t0) {
            return rl_integral_right(samples(f, dt, t0), v, 0);
        },
        py::arg("samples"), py::arg("v"), py::arg("dt"), py::arg("t0") = 0.0,
        "Right integral of order v over the whole sample range.");
    m.def(
        "caputo_derivative",
        [](const std::vector<double>& f, double q, double dt, double t0) {
            return caputo_derivative(samples(f, dt, t0), q, f.size() - 1);
        },
        py::arg("samples"), py::arg("q"), py::arg("dt"), py::arg("t0") = 0.0,
        "Caputo derivative at the last sample.");
    m.def(
        "rl_derivative",
        [](const std::vector<double>& f, double q, double dt, double t0) {
            return rl_derivative(samples(f, dt, t0), q, f.size() - 1);
        },
        py::arg("samples"), py::arg("q"), py::arg("dt"), py::arg("t0") = 0.0,
        "Riemann-Liouville derivative at the last sample.");

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("orders", &ProblemSpec::orders)
        .def_readonly("initial_state", &ProblemSpec::initial_state)
        .def_readonly("n_controls", &ProblemSpec::n_controls)
        .def_readonly("dynamics", &ProblemSpec::dynamics)
        .def_property_readonly("cost",
                               [](const ProblemSpec& s) {
                                   py::list out;
                                   for (const auto& c : s.cost) out.append(py::make_tuple(c.order, c.operand));
                                   return out;
                               })
        .def_readonly("t0", &ProblemSpec::t0)
        .def_readonly("tf", &ProblemSpec::tf)
        .def_readonly("dt", &ProblemSpec::dt)
        .def_readonly("u_init", &ProblemSpec::u_init)
        .def_readonly("n_a", &ProblemSpec::n_a)
        .def_readonly("n_b", &ProblemSpec::n_b)
        .def_readonly("p_max", &ProblemSpec::p_max)
        .def_readonly("max_iters", &ProblemSpec::max_iters)
        .def_readonly("error_tol", &ProblemSpec::error_tol)
        .def_readonly("relaxation", &ProblemSpec::relaxation)
        .def("to_yaml", &write_problem)
        .def("__eq__", [](const ProblemSpec& a, const ProblemSpec& b) { return a == b; });

    m.def("parse_problem_file", &parse_problem_file, py::arg("path"),
          py::arg("overrides") = std::vector<std::string>{});
    m.def("parse_problem_text", &parse_problem_text, py::arg("text"),
          py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "solve",
        [](const ProblemSpec& spec) {
            RunResult r = [&] {
                py::gil_scoped_release release;
                return run_problem(spec);
            }();
            py::dict d = report_dict(r.report);
            std::vector<double> t(r.state.grid.n_nodes());
            for (std::size_t k = 0; k < t.size(); ++k) t[k] = r.state.grid.node(k);
            d["t"] = t;
            d["x"] = rows(r.state.x);
            d["u"] = rows(r.state.u);
            d["V"] = r.state.value.V;
            d["residuals"] = r.state.residuals;
            d["error_history"] = r.state.error_history;
            d["report_text"] = format_report(r.report);
            d["csv_text"] = trajectory_csv(r.state);
            return d;
        },
        py::arg("spec"), "Solves a problem; returns the report and the per-node trajectories.");

    m.def(
        "verify",
        [](const ProblemSpec& spec, const std::string& csv_path) {
            const auto table = read_trajectory_csv(csv_path, spec);
            VerifyReport r = [&] {
                py::gil_scoped_release release;
                return verify_table(build_problem(spec), spec, table);
            }();
            py::dict d;
            d["error"] = r.error;
            d["residuals"] = r.residuals;
            d["max_stored_difference"] = r.max_stored_difference;
            return d;
        },
        py::arg("spec"), py::arg("csv_path"), "Recomputes the HJB residuals of a stored trajectory CSV.");
}
