#pragma once

namespace frachjb {

/// log|Gamma(x)| together with the sign of Gamma(x).
struct SignedLogGamma {
    double log_abs;
    int sign;
};

/// Gamma function via a Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula for x < 1/2. Relative error is below 1e-13 on (0, 50].
/// Throws DomainError at the poles x = 0, -1, -2, ...
double gamma(double x);

/// Same approximation in logarithmic form; usable where Gamma overflows.
SignedLogGamma log_gamma(double x);

}  // namespace frachjb
