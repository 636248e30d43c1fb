#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "frachjb/errors.hpp"
#include "frachjb/expansion.hpp"
#include "frachjb/fracnum.hpp"
#include "oracle_values.hpp"

using namespace frachjb;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

Trajectory sample_traj(const TimeGrid& g, double (*f)(double)) {
    Trajectory x(g.n_nodes(), 1);
    for (std::size_t k = 0; k < g.n_nodes(); ++k) x.at(k, 0) = f(g.node(k));
    return x;
}

}  // namespace

TEST_SUITE("expansion") {
    TEST_CASE("hand-evaluated coefficients") {
        CHECK(coeff_A(0.5, 2) == doctest::Approx(1.5 / std::tgamma(0.5)).epsilon(1e-14));
        CHECK(coeff_A(0.5, 2) == doctest::Approx(0.8462843753).epsilon(1e-10));
        CHECK(coeff_B(0.5, 1) == doctest::Approx(2.0 / std::tgamma(1.5)).epsilon(1e-14));
        CHECK(coeff_B(0.5, 1) == doctest::Approx(2.2567583342).epsilon(1e-10));
        CHECK(coeff_C(0.5, 2) == doctest::Approx(-1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-13));
        CHECK(coeff_C(0.5, 2) == doctest::Approx(-0.2820947918).epsilon(1e-9));
    }

    TEST_CASE("A and B match closed forms") {
        for (const auto& c : oracle::kCoeffs) {
            CAPTURE(c.q);
            CAPTURE(c.n);
            const auto n = static_cast<std::uint64_t>(c.n);
            CHECK(rel_close(coeff_A(c.q, n), c.a, 1e-12));
            CHECK(rel_close(coeff_B(c.q, n), c.b_printed, 1e-12));
            CHECK(rel_close(coeff_B(c.q, n, BSeries::convergent), c.b_convergent, 1e-10));
        }
    }

    TEST_CASE("C matches the closed form and keeps its sign") {
        for (const auto& c : oracle::kC) {
            CAPTURE(c.q);
            CAPTURE(c.p);
            CHECK(rel_close(coeff_C(c.q, c.p), c.value, 1e-12));
        }
        for (double q : {0.05, 0.2, 0.5, 0.7, 0.95}) {
            for (int p = 2; p <= 400; ++p) {
                CHECK(coeff_C(q, p) < 0.0);
                CHECK(coeff_C(q, p + 1) / coeff_C(q, p) == doctest::Approx((p - 1.0 + q) / p).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("sign structure and monotonicity") {
        CHECK(coeff_A(0.5, 10'000) > coeff_A(0.5, 100));
        for (double q : {0.1, 0.5, 0.9}) {
            for (std::uint64_t n : {2ull, 10ull, 1000ull}) {
                CHECK(coeff_A(q, n) > 0.0);
                CHECK(coeff_B(q, n) > 0.0);
                CHECK(coeff_B(q, n, BSeries::convergent) > 0.0);
                CHECK(coeff_B(q, n) > coeff_A(q, n + 1) * std::tgamma(1.0 - q) / std::tgamma(2.0 - q));
            }
        }
    }

    TEST_CASE("coefficient domain checks") {
        CHECK_THROWS_AS(coeff_A(0.0, 10), DomainError);
        CHECK_THROWS_AS(coeff_A(1.0, 10), DomainError);
        CHECK_THROWS_AS(coeff_A(0.5, 1), DomainError);
        CHECK_THROWS_AS(coeff_B(0.5, 0), DomainError);
        CHECK_THROWS_AS(coeff_C(0.5, 1), DomainError);
        CHECK_THROWS_AS(ExpansionCoeffs::compute(0.5, Truncation{10, 10, 1, BSeries::printed}), DomainError);
    }

    TEST_CASE("moment states of simple trajectories") {
        const TimeGrid g(0.0, 1.0, 0.01);
        const auto ones = sample_traj(g, [](double) { return 1.0; });
        const auto W = integrate_W(g, ones, 40);
        for (std::size_t k = 0; k < g.n_nodes(); ++k) {
            const double t = g.node(k);
            CHECK(W.W(k, 0, 2) == doctest::Approx(-t).epsilon(1e-13));
            CHECK(W.W(k, 0, 3) == doctest::Approx(-t * t).epsilon(1e-13));
        }
        for (int p = 2; p <= 40; ++p) CHECK(W.W(0, 0, p) == 0.0);
        const auto zeros = sample_traj(g, [](double) { return 0.0; });
        const auto Z = integrate_W(g, zeros, 40);
        for (std::size_t k = 0; k < g.n_nodes(); ++k) {
            for (double y : Z.scaled(k, 0)) CHECK(y == 0.0);
        }
    }

    TEST_CASE("moment states converge at second order on a curved trajectory") {
        // x = t^2: W_p = (1-p) t^(p+1) / (p+1), scaled Y_p = (1-p) t^2 / (p+1).
        auto err = [](double dt) {
            const TimeGrid g(0.0, 1.0, dt);
            const auto W = integrate_W(g, sample_traj(g, [](double t) { return t * t; }), 150);
            double worst = 0.0;
            for (int p : {2, 5, 20, 150}) {
                worst = std::max(worst, std::abs(W.scaled(g.n_steps(), 0)[p - 2] - (1.0 - p) / (p + 1.0)));
            }
            return worst;
        };
        const double e1 = err(0.02);
        const double e2 = err(0.01);
        CHECK(e2 < 1e-3);
        CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
    }

    TEST_CASE("moment stepping is linear in x") {
        const TimeGrid g(0.0, 1.0, 0.05);
        const auto a = sample_traj(g, [](double t) { return std::sin(4.0 * t); });
        const auto b = sample_traj(g, [](double t) { return 1.0 + t * t * t; });
        Trajectory mix(g.n_nodes(), 1);
        for (std::size_t k = 0; k < g.n_nodes(); ++k) mix.at(k, 0) = 2.0 * a.at(k, 0) - 0.5 * b.at(k, 0);
        const auto Wa = integrate_W(g, a, 30);
        const auto Wb = integrate_W(g, b, 30);
        const auto Wm = integrate_W(g, mix, 30);
        for (std::size_t k = 0; k < g.n_nodes(); ++k) {
            for (std::size_t j = 0; j < Wm.count(); ++j) {
                const double want = 2.0 * Wa.scaled(k, 0)[j] - 0.5 * Wb.scaled(k, 0)[j];
                CHECK(std::abs(Wm.scaled(k, 0)[j] - want) <= 1e-13 * std::max(1.0, std::abs(want)));
            }
        }
    }

    TEST_CASE("correction term") {
        const auto c = ExpansionCoeffs::compute(0.4, Truncation{100, 100, 2, BSeries::printed});
        const std::vector<double> zero{0.0};
        CHECK(correction_k(0.3, 0.0, 0.0, c, zero) == 0.0);
        // x = 3 constant, p_max = 2, W_2 = -3 s (scaled Y_2 = -3)
        const double s = 0.6;
        const std::vector<double> y{-3.0};
        const double by_hand = -3.0 * std::pow(s, -0.4) / std::tgamma(0.6) + c.a * std::pow(s, -0.4) * 3.0 -
                               c.c_at(2) * std::pow(s, -1.4) * (-3.0 * s);
        CHECK(correction_k(s, 3.0, 3.0, c, y) == doctest::Approx(by_hand).epsilon(1e-13));
        CHECK_THROWS_AS(correction_k(0.0, 1.0, 1.0, c, y), SingularPoint);
    }

    TEST_CASE("expansion reproduces the Caputo derivative as truncations grow") {
        const double q = 0.5;
        const TimeGrid g(0.0, 1.0, 1e-3);
        const auto x = sample_traj(g, [](double t) { return t * t; });
        const auto f = SampledFunction::from(g, [](double t) { return t * t; });
        std::vector<double> last(5, 1e300);
        for (int level : {4, 16, 64}) {
            const Truncation tr{static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(level), level,
                                BSeries::convergent};
            const auto c = ExpansionCoeffs::compute(q, tr);
            const auto W = integrate_W(g, x, level);
            for (std::size_t i = 0; i < 5; ++i) {
                const std::size_t k = 200 * (i + 1);
                const double t = g.node(k);
                const double k_term = correction_k(t, t * t, 0.0, c, W.scaled(k, 0));
                const double err = std::abs(k_term + c.b * std::pow(t, 1.0 - q) * 2.0 * t - caputo_derivative(f, q, k));
                CHECK(err < last[i]);
                last[i] = err;
            }
        }
        for (double e : last) CHECK(e < 2e-3);
    }

    TEST_CASE("truncation tail shrinks as p_max grows") {
        // x = 1: each tail term is |C(q,p)| s^(-q); s = 0.8.
        const double q = 0.3;
        double prev = 1e300;
        for (int p_max : {10, 40, 160}) {
            double tail = 0.0;
            for (int p = p_max + 1; p <= 5000; ++p) tail += std::abs(coeff_C(q, p)) * std::pow(0.8, -q);
            CHECK(tail < prev);
            prev = tail;
        }
    }

    TEST_CASE("transformed field at a probe point") {
        const TransformedField field(fixtures::two_state_plant(), Truncation{10'000'000, 10'000'000, 150, BSeries::printed});
        std::vector<double> row(2 * 149);
        for (std::size_t j = 0; j < 149; ++j) {
            row[j] = -1.0;
            row[149 + j] = -0.5;
        }
        std::vector<double> out(2);
        const std::vector<double> x{1.0, 0.5};
        const std::vector<double> u{0.0};
        field.evaluate(0.5, x, row, u, out);
        CHECK(rel_close(out[0], oracle::kTwoStateFTilde[0], 1e-10));
        CHECK(rel_close(out[1], oracle::kTwoStateFTilde[1], 1e-10));
        CHECK_THROWS_AS(field.evaluate(0.0, x, row, u, out), SingularPoint);
    }

    TEST_CASE("transformed field tends to f as q tends to 1") {
        const TransformedField field(fixtures::two_state_plant(0.999, 0.999),
                                     Truncation{150, 150, 150, BSeries::convergent});
        std::vector<double> row(2 * 149);
        for (std::size_t j = 0; j < 149; ++j) {
            row[j] = -1.0;
            row[149 + j] = -0.5;
        }
        std::vector<double> out(2);
        for (double u0 : {-2.0, 0.0, 3.0}) {
            const std::vector<double> u{u0};
            field.evaluate(0.5, std::vector<double>{1.0, 0.5}, row, u, out);
            CHECK(out[0] == doctest::Approx(0.5 + u0).epsilon(0.05));
            CHECK(out[1] == doctest::Approx(-1.0).epsilon(0.05));
        }
    }

    TEST_CASE("zero dynamics from rest give zero field") {
        const FractionalPlant plant({0.3, 0.6}, {0.0, 0.0}, 1,
                                    [](double, std::span<const double>, std::span<const double>, std::span<double> o) {
                                        o[0] = 0.0;
                                        o[1] = 0.0;
                                    });
        const TransformedField field(plant, Truncation{1000, 1000, 20, BSeries::printed});
        const TimeGrid g(0.0, 1.0, 0.1);
        const auto W = integrate_W(g, Trajectory(g.n_nodes(), 2), 20);
        const auto v = f_tilde(field, W, 5, 0.5, std::vector<double>{0.0, 0.0}, std::vector<double>{0.7});
        CHECK(v[0] == 0.0);
        CHECK(v[1] == 0.0);
    }
}

TEST_SUITE("expansion_long") {
    TEST_CASE("coefficients at N = 1e9 match closed forms") {
        for (const auto& c : oracle::kCoeffsLong) {
            CAPTURE(c.q);
            const auto n = static_cast<std::uint64_t>(c.n);
            CHECK(rel_close(coeff_A(c.q, n), c.a, 1e-9));
            CHECK(rel_close(coeff_B(c.q, n), c.b_printed, 1e-9));
            CHECK(rel_close(coeff_B(c.q, n, BSeries::convergent), c.b_convergent, 1e-9));
        }
    }
}
