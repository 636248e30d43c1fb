#include <doctest.h>

#include <cmath>
#include <vector>

#include "frachjb/cost.hpp"
#include "frachjb/errors.hpp"
#include "frachjb/fracnum.hpp"
#include "oracle_values.hpp"

using namespace frachjb;

namespace {

using Span = std::span<const double>;

CostTerm constant_running(double v, double c) {
    return CostTerm::running(v, [c](double, Span, Span) { return c; });
}

double norm2_terminal(double, Span x) { return x[0] * x[0] + x[1] * x[1]; }

Trajectory smooth_states(const TimeGrid& g) {
    Trajectory x(g.n_nodes(), 2);
    for (std::size_t k = 0; k < g.n_nodes(); ++k) {
        const double t = g.node(k);
        x.at(k, 0) = std::cos(2.0 * t) + 0.3 * t;
        x.at(k, 1) = std::exp(-t) * std::sin(3.0 * t);
    }
    return x;
}

Trajectory smooth_controls(const TimeGrid& g) {
    Trajectory u(g.n_nodes(), 1);
    for (std::size_t k = 0; k < g.n_nodes(); ++k) u.at(k, 0) = 1.0 - g.node(k) * g.node(k);
    return u;
}

double running_sq(double t, Span x, Span u) { return x[0] * x[0] + t * x[1] * x[1] + u[0] * u[0]; }

}  // namespace

TEST_SUITE("cost") {
    TEST_CASE("terminal index set") {
        const PerformanceIndex running_only({constant_running(0.3, 1.0), constant_running(0.4, 1.0)});
        CHECK(terminal_index_set(running_only).empty());
        const PerformanceIndex bolza({CostTerm::terminal(norm2_terminal), constant_running(1.0, 1.0)});
        CHECK(terminal_index_set(bolza) == std::vector<std::size_t>{0});
        CHECK_THROWS_AS(PerformanceIndex({}), DomainError);
    }

    TEST_CASE("terminal value conventions") {
        const std::vector<double> x{1.0, 2.0};
        const PerformanceIndex running_only({constant_running(0.3, 1.0), constant_running(0.4, 1.0)});
        CHECK(terminal_value(running_only, 1.0, x) == 0.0);
        const PerformanceIndex bolza({CostTerm::terminal(norm2_terminal), constant_running(1.0, 1.0)});
        CHECK(terminal_value(bolza, 1.0, x) == 5.0);
        const PerformanceIndex two({CostTerm::terminal(norm2_terminal),
                                    CostTerm::terminal([](double tf, Span s) { return tf * s[1]; })});
        CHECK(terminal_value(two, 3.0, x) == 11.0);
    }

    TEST_CASE("term construction checks") {
        CHECK_THROWS_AS(constant_running(0.0, 1.0), DomainError);
        CHECK_THROWS_AS(constant_running(2.5, 1.0), DomainError);
        CHECK_NOTHROW(constant_running(2.0, 1.0));
        const auto term = constant_running(0.5, 1.0);
        CHECK_FALSE(term.is_terminal());
        CHECK(CostTerm::terminal(norm2_terminal).is_terminal());
    }

    TEST_CASE("running weights") {
        for (double t : {0.0, 0.3, 0.9, 1.0}) CHECK(running_weight(1.0, t, 1.0) == 1.0);
        double g03 = 0.0;
        for (const auto& e : oracle::kGamma) {
            if (e.x == 0.3) g03 = e.value;
        }
        REQUIRE(g03 > 0.0);
        CHECK(running_weight(0.3, 0.0, 1.0) == doctest::Approx(1.0 / g03).epsilon(1e-13));
        CHECK(running_weight(0.3, 0.0, 1.0) == doctest::Approx(0.3342727526).epsilon(1e-9));
        CHECK_THROWS_AS(running_weight(0.3, 1.0, 1.0), SingularPoint);
        CHECK(running_weight(1.5, 1.0, 1.0) == 0.0);
        double prev_low = 0.0;
        double prev_high = 1e300;
        for (int i = 0; i < 20; ++i) {
            const double t = 0.05 * i;
            const double low = running_weight(0.4, t, 1.0);
            const double high = running_weight(1.5, t, 1.0);
            CHECK(low > prev_low);
            CHECK(high < prev_high);
            prev_low = low;
            prev_high = high;
        }
    }

    TEST_CASE("constant operands integrate in closed form") {
        const TimeGrid g(0.0, 1.0, 0.01);
        const Trajectory x(g.n_nodes(), 1);
        const Trajectory u(g.n_nodes(), 1);
        CHECK(evaluate(PerformanceIndex({constant_running(1.0, 1.0)}), g, x, u) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(evaluate(PerformanceIndex({constant_running(0.5, 1.0)}), g, x, u) ==
              doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-13));
        // cost-to-go from t = 0.4 with v = 0.3: 0.6^0.3 / Gamma(1.3)
        CHECK(evaluate(PerformanceIndex({constant_running(0.3, 2.0)}), g, x, u, 40) ==
              doctest::Approx(2.0 * std::pow(0.6, 0.3) / std::tgamma(1.3)).epsilon(1e-12));
        CHECK(evaluate(PerformanceIndex({constant_running(0.3, 2.0)}), g, x, u, g.n_steps()) == 0.0);
    }

    TEST_CASE("Bolza reduction matches a plain evaluator") {
        const TimeGrid g(0.0, 2.0, 0.004);
        const auto x = smooth_states(g);
        const auto u = smooth_controls(g);
        const PerformanceIndex bolza({CostTerm::terminal(norm2_terminal), CostTerm::running(1.0, running_sq)});
        for (std::size_t from : {std::size_t{0}, std::size_t{123}, g.n_steps() - 1}) {
            double integral = 0.0;
            for (std::size_t k = from; k < g.n_steps(); ++k) {
                integral += 0.5 * g.dt() *
                            (running_sq(g.node(k), x.row(k), u.row(k)) + running_sq(g.node(k + 1), x.row(k + 1), u.row(k + 1)));
            }
            const double plain = norm2_terminal(2.0, x.row(g.n_steps())) + integral;
            CHECK(std::abs(evaluate(bolza, g, x, u, from) - plain) <= 1e-10);
        }
    }

    TEST_CASE("fractional terms converge to the continuous integral") {
        // g = t^2 on [0, 1], v = 0.4: I = 2 / Gamma(3.4) at tf.
        auto err = [](double dt) {
            const TimeGrid g(0.0, 1.0, dt);
            const Trajectory x(g.n_nodes(), 1);
            const Trajectory u(g.n_nodes(), 1);
            const PerformanceIndex pi({CostTerm::running(0.4, [](double t, Span, Span) { return t * t; })});
            return std::abs(evaluate(pi, g, x, u) - 2.0 / std::tgamma(3.4));
        };
        CHECK(err(0.01) < 1e-4);
        CHECK(std::log2(err(0.02) / err(0.01)) == doctest::Approx(2.0).epsilon(0.15));
    }

    TEST_CASE("additivity and nonnegativity") {
        const TimeGrid g(0.0, 1.0, 0.01);
        const auto x = smooth_states(g);
        const auto u = smooth_controls(g);
        auto a = CostTerm::running(0.3, running_sq);
        auto b = CostTerm::running(1.7, [](double, Span s, Span) { return std::abs(s[1]); });
        auto c = CostTerm::terminal(norm2_terminal);
        const double sum = evaluate(PerformanceIndex({a}), g, x, u) + evaluate(PerformanceIndex({b}), g, x, u) +
                           evaluate(PerformanceIndex({c}), g, x, u);
        const double joint = evaluate(PerformanceIndex({a, b, c}), g, x, u);
        CHECK(joint == doctest::Approx(sum).epsilon(1e-14));
        for (std::size_t from = 0; from <= g.n_steps(); from += 7) CHECK(evaluate(PerformanceIndex({a, b, c}), g, x, u, from) >= 0.0);
    }

    TEST_CASE("weighted running cost") {
        const PerformanceIndex pi({CostTerm::running(0.3, running_sq), CostTerm::running(1.0, running_sq),
                                   CostTerm::terminal(norm2_terminal)});
        const std::vector<double> x{0.5, -1.0};
        const std::vector<double> u{2.0};
        const double g = running_sq(0.2, x, u);
        CHECK(weighted_running_cost(pi, 0.2, 0.2, 1.0, x, u) ==
              doctest::Approx(g * (std::pow(0.8, -0.7) / std::tgamma(0.3) + 1.0)).epsilon(1e-14));
        CHECK(weighted_running_cost(pi, 1.0, 0.99, 1.0, x, u) ==
              doctest::Approx(running_sq(1.0, x, u) * (std::pow(0.01, -0.7) / std::tgamma(0.3) + 1.0)).epsilon(1e-13));
    }

    TEST_CASE("trajectory shape checks") {
        const TimeGrid g(0.0, 1.0, 0.1);
        const PerformanceIndex pi({constant_running(1.0, 1.0)});
        CHECK_THROWS_AS(evaluate(pi, g, Trajectory(5, 1), Trajectory(g.n_nodes(), 1)), DimensionError);
        CHECK_THROWS_AS(evaluate(pi, g, Trajectory(g.n_nodes(), 1), Trajectory(g.n_nodes(), 1), 11), DimensionError);
    }
}
