#include <doctest.h>

#include <cmath>

#include "frachjb/errors.hpp"
#include "frachjb/special.hpp"
#include "oracle_values.hpp"


namespace fj = frachjb;

TEST_SUITE("special") {
    TEST_CASE("gamma at integers is the factorial") {
        CHECK(fj::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(fj::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
        double f = 1.0;
        for (int n = 1; n <= 20; ++n) {
            CHECK(fj::gamma(n) == doctest::Approx(f).epsilon(1e-13));
            f *= n;
        }
    }

    TEST_CASE("gamma matches high-precision reference values") {
        for (const auto& [x, value] : oracle::kGamma) {
            CAPTURE(x);
            CHECK(std::abs(fj::gamma(x) / value - 1.0) <= 1e-12);
        }
    }

    TEST_CASE("gamma relative error over (0, 50] against std::tgamma") {
        double worst = 0.0;
        for (double x = 0.01; x <= 50.0; x += 0.0173) {
            worst = std::max(worst, std::abs(fj::gamma(x) / std::tgamma(x) - 1.0));
        }
        CHECK(worst <= 1e-12);
    }

    TEST_CASE("log_gamma with sign") {
        for (const auto& [x, value] : oracle::kLogGamma) {
            CAPTURE(x);
            const auto lg = fj::log_gamma(x);
            CHECK(lg.sign == 1);
            CHECK(std::abs(lg.log_abs - value) <= 1e-12 * std::abs(value));
        }
        const auto neg = fj::log_gamma(-0.5);
        CHECK(neg.sign == -1);
        CHECK(neg.log_abs == doctest::Approx(std::log(2.0 * std::sqrt(M_PI))).epsilon(1e-13));
    }

    TEST_CASE("poles are domain errors") {
        CHECK_THROWS_AS(fj::gamma(0.0), frachjb::DomainError);
        CHECK_THROWS_AS(fj::gamma(-1.0), frachjb::DomainError);
        CHECK_THROWS_AS(fj::gamma(-3.0), frachjb::DomainError);
        CHECK_THROWS_AS(fj::log_gamma(-2.0), frachjb::DomainError);
        CHECK_THROWS_AS(fj::gamma(std::nan("")), frachjb::DomainError);
    }
}
