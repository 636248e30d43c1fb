#include "frachjb/problem_file.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "frachjb/errors.hpp"
#include "frachjb/expr.hpp"

namespace frachjb {
namespace {

std::string where(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    if (mark.is_null()) return "";
    return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) +
           ")";
}

[[noreturn]] void fail(const std::string& field, const std::string& msg, const YAML::Node& node) {
    throw ProblemError(field + ": " + msg + where(node));
}

void check_keys(const YAML::Node& map, const std::string& field,
                const std::set<std::string>& allowed) {
    if (!map.IsMap()) fail(field, "expected a mapping", map);
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            fail(field.empty() ? key : field + "." + key, "unknown key", kv.first);
        }
    }
}

double to_double(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) fail(field, "expected a number", node);
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        fail(field, "expected a number, got '" + node.Scalar() + "'", node);
    }
}

double to_finite(const YAML::Node& node, const std::string& field) {
    const double v = to_double(node, field);
    if (!std::isfinite(v)) fail(field, "must be finite", node);
    return v;
}

std::int64_t to_integer(const YAML::Node& node, const std::string& field) {
    const double v = to_double(node, field);
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15) {
        fail(field, "expected an integer", node);
    }
    return static_cast<std::int64_t>(v);
}

bool to_bool(const YAML::Node& node, const std::string& field) {
    try {
        return node.as<bool>();
    } catch (const YAML::Exception&) {
        fail(field, "expected true or false", node);
    }
}

std::string to_string(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) fail(field, "expected a string", node);
    return node.Scalar();
}

std::vector<double> to_doubles(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence()) fail(field, "expected a list of numbers", node);
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(to_double(node[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

YAML::Node required(const YAML::Node& map, const std::string& key, const std::string& field) {
    const YAML::Node n = map[key];
    if (!n) fail(field + "." + key, "required", map);
    return n;
}

void check_expression(const std::string& text, const std::string& field, const YAML::Node& node,
                      std::size_t n_states, std::size_t n_controls, bool allow_controls) {
    try {
        Expression::parse(text, n_states, n_controls, allow_controls);
    } catch (const ExpressionError& e) {
        fail(field, e.what(), node);
    }
}

void apply_override(YAML::Node& root, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ProblemError("override '" + item + "': expected key=value");
    }
    const std::string path = item.substr(0, eq);
    YAML::Node value;
    try {
        value = YAML::Load(item.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw ProblemError("override '" + item + "': " + e.msg);
    }
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    // Nodes are handles, so reassigning `node` below would rebind rather than
    // descend; the chain is walked on fresh handles instead.
    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (next && !next.IsMap()) throw ProblemError("override '" + item + "': '" + parts[i] + "' is not a block");
        chain.push_back(next);
    }
    chain.back()[parts.back()] = value;
}

ProblemSpec parse_root(const YAML::Node& root) {
    if (!root || !root.IsMap()) throw ProblemError("problem file: expected a mapping at top level");
    check_keys(root, "", {"plant", "cost", "solver", "output"});
    ProblemSpec spec;

    const YAML::Node plant = required(root, "plant", "");
    check_keys(plant, "plant", {"orders", "initial_state", "controls", "dynamics"});
    const YAML::Node orders = required(plant, "orders", "plant");
    spec.orders = to_doubles(orders, "plant.orders");
    if (spec.orders.empty()) fail("plant.orders", "at least one state is required", orders);
    for (std::size_t i = 0; i < spec.orders.size(); ++i) {
        const double q = spec.orders[i];
        if (!(q > 0.0 && q < 1.0)) {
            fail("plant.orders[" + std::to_string(i) + "]",
                 "order must satisfy 0 < q < 1, got " + orders[i].Scalar(), orders[i]);
        }
    }
    const std::size_t n = spec.orders.size();
    const YAML::Node x0 = required(plant, "initial_state", "plant");
    spec.initial_state = to_doubles(x0, "plant.initial_state");
    if (spec.initial_state.size() != n) {
        fail("plant.initial_state", "expected " + std::to_string(n) + " values", x0);
    }
    for (double v : spec.initial_state) {
        if (!std::isfinite(v)) fail("plant.initial_state", "values must be finite", x0);
    }
    if (const YAML::Node m = plant["controls"]) {
        const auto c = to_integer(m, "plant.controls");
        if (c < 1) fail("plant.controls", "at least one control is required", m);
        spec.n_controls = static_cast<std::size_t>(c);
    }
    const std::size_t m = spec.n_controls;
    const YAML::Node dyn = required(plant, "dynamics", "plant");
    if (!dyn.IsSequence() || dyn.size() != n) {
        fail("plant.dynamics", "expected a list of " + std::to_string(n) + " expressions", dyn);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::string field = "plant.dynamics[" + std::to_string(i) + "]";
        spec.dynamics.push_back(to_string(dyn[i], field));
        check_expression(spec.dynamics.back(), field, dyn[i], n, m, true);
    }

    const YAML::Node cost = required(root, "cost", "");
    if (!cost.IsSequence() || cost.size() == 0) fail("cost", "expected a non-empty list of terms", cost);
    for (std::size_t j = 0; j < cost.size(); ++j) {
        const std::string field = "cost[" + std::to_string(j) + "]";
        check_keys(cost[j], field, {"order", "operand"});
        CostTermSpec term;
        const YAML::Node order = required(cost[j], "order", field);
        term.order = to_double(order, field + ".order");
        if (!(term.order == 0.0 || (term.order > 0.0 && term.order <= 2.0))) {
            fail(field + ".order", "order must be 0 or lie in (0, 2], got " + order.Scalar(), order);
        }
        const YAML::Node operand = required(cost[j], "operand", field);
        term.operand = to_string(operand, field + ".operand");
        check_expression(term.operand, field + ".operand", operand, n, m, term.order != 0.0);
        spec.cost.push_back(term);
    }

    spec.u_init.assign(m, 0.0);
    spec.control_lower.assign(m, -std::numeric_limits<double>::infinity());
    spec.control_upper.assign(m, std::numeric_limits<double>::infinity());
    if (const YAML::Node solver = root["solver"]) {
        check_keys(solver, "solver",
                   {"t0", "tf", "dt", "u_init", "n_a", "n_b", "p_max", "b_series", "max_iters",
                    "error_tol", "relaxation", "control_bounds", "quadratic_control"});
        if (auto v = solver["t0"]) spec.t0 = to_finite(v, "solver.t0");
        if (auto v = solver["tf"]) spec.tf = to_finite(v, "solver.tf");
        if (!(spec.tf > spec.t0)) fail("solver.tf", "must exceed solver.t0", solver);
        if (auto v = solver["dt"]) spec.dt = to_finite(v, "solver.dt");
        if (!(spec.dt > 0.0)) fail("solver.dt", "must be positive", solver["dt"]);
        try {
            const TimeGrid grid(spec.t0, spec.tf, spec.dt);
            if (grid.n_steps() < 2) fail("solver.dt", "must leave at least two steps", solver["dt"]);
        } catch (const DomainError& e) {
            fail("solver.dt", e.what(), solver["dt"]);
        }
        if (auto v = solver["u_init"]) {
            if (v.IsSequence()) {
                spec.u_init = to_doubles(v, "solver.u_init");
                if (spec.u_init.size() != m) {
                    fail("solver.u_init", "expected " + std::to_string(m) + " values", v);
                }
            } else {
                spec.u_init.assign(m, to_double(v, "solver.u_init"));
            }
            for (double u : spec.u_init) {
                if (!std::isfinite(u)) fail("solver.u_init", "values must be finite", v);
            }
        }
        if (auto v = solver["n_a"]) {
            const auto k = to_integer(v, "solver.n_a");
            if (k < 2) fail("solver.n_a", "must be at least 2", v);
            spec.n_a = static_cast<std::uint64_t>(k);
        }
        if (auto v = solver["n_b"]) {
            const auto k = to_integer(v, "solver.n_b");
            if (k < 1) fail("solver.n_b", "must be at least 1", v);
            spec.n_b = static_cast<std::uint64_t>(k);
        }
        if (auto v = solver["p_max"]) {
            const auto k = to_integer(v, "solver.p_max");
            if (k < 2 || k > 100000) fail("solver.p_max", "must lie in [2, 100000]", v);
            spec.p_max = static_cast<int>(k);
        }
        if (auto v = solver["b_series"]) {
            const std::string s = to_string(v, "solver.b_series");
            if (s == "printed") {
                spec.b_series = BSeries::printed;
            } else if (s == "convergent") {
                spec.b_series = BSeries::convergent;
            } else {
                fail("solver.b_series", "expected 'printed' or 'convergent', got '" + s + "'", v);
            }
        }
        if (auto v = solver["max_iters"]) {
            const auto k = to_integer(v, "solver.max_iters");
            if (k < 0 || k > 1'000'000) fail("solver.max_iters", "must lie in [0, 1000000]", v);
            spec.max_iters = static_cast<int>(k);
        }
        if (auto v = solver["error_tol"]) {
            spec.error_tol = to_finite(v, "solver.error_tol");
            if (!(spec.error_tol > 0.0)) fail("solver.error_tol", "must be positive", v);
        }
        if (auto v = solver["relaxation"]) {
            spec.relaxation = to_finite(v, "solver.relaxation");
            if (!(spec.relaxation > 0.0 && spec.relaxation <= 1.0)) {
                fail("solver.relaxation", "must satisfy 0 < theta <= 1", v);
            }
        }
        if (auto v = solver["quadratic_control"]) {
            spec.quadratic_control = to_bool(v, "solver.quadratic_control");
        }
        if (auto v = solver["control_bounds"]) {
            if (!v.IsSequence() || v.size() != m) {
                fail("solver.control_bounds", "expected " + std::to_string(m) + " [lower, upper] pairs", v);
            }
            for (std::size_t c = 0; c < m; ++c) {
                const std::string field = "solver.control_bounds[" + std::to_string(c) + "]";
                const auto pair = to_doubles(v[c], field);
                if (pair.size() != 2 || std::isnan(pair[0]) || std::isnan(pair[1]) || !(pair[0] <= pair[1])) {
                    fail(field, "expected [lower, upper] with lower <= upper", v[c]);
                }
                spec.control_lower[c] = pair[0];
                spec.control_upper[c] = pair[1];
            }
        }
    }
    if (!spec.quadratic_control) {
        for (std::size_t c = 0; c < m; ++c) {
            if (!std::isfinite(spec.control_lower[c]) || !std::isfinite(spec.control_upper[c])) {
                throw ProblemError("solver.control_bounds: control " + std::to_string(c + 1) +
                                   " needs finite bounds unless solver.quadratic_control is true");
            }
        }
    }

    if (const YAML::Node output = root["output"]) {
        check_keys(output, "output", {"csv", "report"});
        if (auto v = output["csv"]) spec.csv_path = to_string(v, "output.csv");
        if (auto v = output["report"]) spec.report_path = to_string(v, "output.report");
    }
    return spec;
}

}  // namespace

ProblemSpec parse_problem_text(const std::string& text, const std::vector<std::string>& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ProblemError("problem file: " + e.msg + " (line " + std::to_string(e.mark.line + 1) +
                           ", column " + std::to_string(e.mark.column + 1) + ")");
    }
    if (!overrides.empty() && !root.IsMap()) throw ProblemError("problem file: expected a mapping at top level");
    for (const std::string& item : overrides) apply_override(root, item);
    try {
        return parse_root(root);
    } catch (const YAML::Exception& e) {
        throw ProblemError("problem file: " + e.msg);
    }
}

ProblemSpec parse_problem_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open problem file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_problem_text(buffer.str(), overrides);
}

std::string write_problem(const ProblemSpec& spec) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    auto numbers = [&](const std::vector<double>& v) {
        out << YAML::Flow << YAML::BeginSeq;
        for (double d : v) out << d;
        out << YAML::EndSeq;
    };
    out << YAML::BeginMap;
    out << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "orders" << YAML::Value;
    numbers(spec.orders);
    out << YAML::Key << "initial_state" << YAML::Value;
    numbers(spec.initial_state);
    out << YAML::Key << "controls" << YAML::Value << spec.n_controls;
    out << YAML::Key << "dynamics" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : spec.dynamics) out << YAML::DoubleQuoted << d;
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "cost" << YAML::Value << YAML::BeginSeq;
    for (const auto& term : spec.cost) {
        out << YAML::BeginMap << YAML::Key << "order" << YAML::Value << term.order;
        out << YAML::Key << "operand" << YAML::Value << YAML::DoubleQuoted << term.operand;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t0" << YAML::Value << spec.t0;
    out << YAML::Key << "tf" << YAML::Value << spec.tf;
    out << YAML::Key << "dt" << YAML::Value << spec.dt;
    out << YAML::Key << "u_init" << YAML::Value;
    numbers(spec.u_init);
    out << YAML::Key << "n_a" << YAML::Value << spec.n_a;
    out << YAML::Key << "n_b" << YAML::Value << spec.n_b;
    out << YAML::Key << "p_max" << YAML::Value << spec.p_max;
    out << YAML::Key << "b_series" << YAML::Value
        << (spec.b_series == BSeries::printed ? "printed" : "convergent");
    out << YAML::Key << "max_iters" << YAML::Value << spec.max_iters;
    out << YAML::Key << "error_tol" << YAML::Value << spec.error_tol;
    out << YAML::Key << "relaxation" << YAML::Value << spec.relaxation;
    out << YAML::Key << "control_bounds" << YAML::Value << YAML::BeginSeq;
    for (std::size_t c = 0; c < spec.n_controls; ++c) {
        numbers({spec.control_lower[c], spec.control_upper[c]});
    }
    out << YAML::EndSeq;
    out << YAML::Key << "quadratic_control" << YAML::Value << spec.quadratic_control;
    out << YAML::EndMap;

    if (!spec.csv_path.empty() || !spec.report_path.empty()) {
        out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
        if (!spec.csv_path.empty()) out << YAML::Key << "csv" << YAML::Value << spec.csv_path;
        if (!spec.report_path.empty()) out << YAML::Key << "report" << YAML::Value << spec.report_path;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

HJBProblem build_problem(const ProblemSpec& spec) {
    const std::size_t n = spec.orders.size();
    const std::size_t m = spec.n_controls;
    std::vector<Expression> dyn;
    for (const auto& d : spec.dynamics) dyn.push_back(Expression::parse(d, n, m));
    VectorField field = [dyn](double t, std::span<const double> x, std::span<const double> u,
                              std::span<double> out) {
        for (std::size_t i = 0; i < dyn.size(); ++i) out[i] = dyn[i](t, x, u);
    };
    FractionalPlant plant(spec.orders, spec.initial_state, m, std::move(field));

    std::vector<CostTerm> terms;
    for (const auto& term : spec.cost) {
        if (term.order == 0.0) {
            Expression h = Expression::parse(term.operand, n, m, false);
            terms.push_back(CostTerm::terminal(
                [h](double tf, std::span<const double> x) { return h(tf, x, {}); }));
        } else {
            Expression g = Expression::parse(term.operand, n, m);
            terms.push_back(CostTerm::running(
                term.order, [g](double t, std::span<const double> x, std::span<const double> u) {
                    return g(t, x, u);
                }));
        }
    }
    return HJBProblem(TransformedField(std::move(plant), spec.truncation(), spec.t0),
                      PerformanceIndex(std::move(terms)),
                      ControlBox{spec.control_lower, spec.control_upper}, spec.t0, spec.tf,
                      spec.quadratic_control);
}

SweepConfig build_config(const ProblemSpec& spec) {
    SweepConfig cfg;
    cfg.dt = spec.dt;
    cfg.u_init = spec.u_init;
    cfg.max_iters = spec.max_iters;
    cfg.error_tol = spec.error_tol;
    cfg.relaxation = spec.relaxation;
    return cfg;
}

}  // namespace frachjb
