#include "frachjb/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "frachjb/errors.hpp"

namespace frachjb {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void check_pole(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        throw DomainError("gamma: pole at non-positive integer argument");
    }
    if (!std::isfinite(x)) {
        throw DomainError("gamma: non-finite argument");
    }
}

// Lanczos series A_g(z) for z = x - 1, x >= 1/2.
double lanczos_series(double z) {
    double sum = kLanczosCoeffs[0];
    for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) {
        sum += kLanczosCoeffs[i] / (z + static_cast<double>(i));
    }
    return sum;
}

}  // namespace

double gamma(double x) {
    check_pole(x);
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
    }
    if (x > 20.0) {
        const SignedLogGamma lg = log_gamma(x);
        return std::exp(lg.log_abs);
    }
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) *
           lanczos_series(z);
}

SignedLogGamma log_gamma(double x) {
    check_pole(x);
    if (x < 0.5) {
        const double s = std::sin(std::numbers::pi * x);
        const SignedLogGamma reflected = log_gamma(1.0 - x);
        return {std::log(std::numbers::pi / std::abs(s)) - reflected.log_abs,
                (s > 0.0 ? 1 : -1) * reflected.sign};
    }
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    const double log_value = 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) -
                             t + std::log(lanczos_series(z));
    return {log_value, 1};
}

}  // namespace frachjb
