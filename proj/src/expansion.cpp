#include "frachjb/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "frachjb/errors.hpp"
#include "frachjb/special.hpp"

namespace frachjb {
namespace {

void check_order(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("expansion: order q must lie in (0, 1), got " + std::to_string(q));
    }
}

// Kahan summation in extended precision. Every series summed here has a
// running sum that dominates the next term, so the plain Kahan update is
// as accurate as Neumaier's and avoids a branch per term.
class CompensatedSum {
public:
    void add(long double x) {
        const long double y = x - comp_;
        const long double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    long double value() const { return sum_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

struct SeriesSums {
    double a_sum;            // 1 + sum_{p=2}^{N_A} g_p
    double b_printed_sum;    // 1 + sum_{p=1}^{N_B} g_p
    double b_convergent_sum; // 1 + sum_{p=1}^{N_B} g_p (q-1)/p
};

// g_p = Gamma(p-1+q) / (Gamma(q) (p-1)!), g_1 = 1, g_{p+1} = g_p (p-1+q)/p.
// All three series share one pass over p.
SeriesSums sum_series(double q, std::uint64_t n_a, std::uint64_t n_b) {
    CompensatedSum a;
    CompensatedSum bp;
    CompensatedSum bc;
    a.add(1.0L);
    bp.add(1.0L);
    bc.add(1.0L);
    const long double ql = q;
    const std::uint64_t n = std::max(n_a, n_b);
    long double g = 1.0L;
    for (std::uint64_t p = 1; p <= n; ++p) {
        const long double pl = static_cast<long double>(p);
        const long double inv_p = 1.0L / pl;
        if (p >= 2 && p <= n_a) a.add(g);
        if (p <= n_b) {
            bp.add(g);
            bc.add(g * (ql - 1.0L) * inv_p);
        }
        g *= (pl - 1.0L + ql) * inv_p;
    }
    return {static_cast<double>(a.value()), static_cast<double>(bp.value()),
            static_cast<double>(bc.value())};
}

using SeriesKey = std::tuple<double, std::uint64_t, std::uint64_t>;

SeriesSums cached_series(double q, std::uint64_t n_a, std::uint64_t n_b) {
    static std::mutex mutex;
    static std::map<SeriesKey, SeriesSums> cache;
    const SeriesKey key{q, n_a, n_b};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const SeriesSums sums = sum_series(q, n_a, n_b);
    std::lock_guard lock(mutex);
    cache.emplace(key, sums);
    return sums;
}

double b_sum(const SeriesSums& sums, BSeries series) {
    return series == BSeries::printed ? sums.b_printed_sum : sums.b_convergent_sum;
}

}  // namespace

double coeff_A(double q, std::uint64_t n_a) {
    check_order(q);
    if (n_a < 2) throw DomainError("coeff_A: N_A must be at least 2");
    return cached_series(q, n_a, n_a).a_sum / gamma(1.0 - q);
}

double coeff_B(double q, std::uint64_t n_b, BSeries series) {
    check_order(q);
    if (n_b < 1) throw DomainError("coeff_B: N_B must be at least 1");
    return b_sum(cached_series(q, n_b, n_b), series) / gamma(2.0 - q);
}

double coeff_C(double q, int p) {
    check_order(q);
    if (p < 2) throw DomainError("coeff_C: p must be at least 2");
    const SignedLogGamma num = log_gamma(p - 1.0 + q);
    const SignedLogGamma g2 = log_gamma(2.0 - q);
    const SignedLogGamma g1 = log_gamma(q - 1.0);
    const SignedLogGamma fact = log_gamma(static_cast<double>(p));
    const double log_abs = num.log_abs - g2.log_abs - g1.log_abs - fact.log_abs;
    return num.sign * g2.sign * g1.sign * std::exp(log_abs);
}

ExpansionCoeffs ExpansionCoeffs::compute(double q, const Truncation& truncation) {
    check_order(q);
    if (truncation.p_max < 2) throw DomainError("expansion: p_max must be at least 2");
    if (truncation.n_a < 2 || truncation.n_b < 1) {
        throw DomainError("expansion: N_A >= 2 and N_B >= 1 required");
    }
    ExpansionCoeffs out;
    out.q = q;
    out.truncation = truncation;
    const SeriesSums sums = cached_series(q, truncation.n_a, truncation.n_b);
    out.a = sums.a_sum / gamma(1.0 - q);
    out.b = b_sum(sums, truncation.b_series) / gamma(2.0 - q);
    out.c.resize(static_cast<std::size_t>(truncation.p_max - 1));
    for (int p = 2; p <= truncation.p_max; ++p) out.c[static_cast<std::size_t>(p - 2)] = coeff_C(q, p);
    return out;
}

AuxiliaryStates::AuxiliaryStates(TimeGrid grid, std::size_t n_components, int p_max)
    : grid_(grid), n_components_(n_components), p_max_(p_max) {
    if (p_max < 2) throw DomainError("AuxiliaryStates: p_max must be at least 2");
    data_.assign(grid_.n_nodes() * n_components_ * count(), 0.0);
}

std::span<const double> AuxiliaryStates::scaled(std::size_t k, std::size_t i) const {
    return {data_.data() + (k * n_components_ + i) * count(), count()};
}

std::span<double> AuxiliaryStates::scaled(std::size_t k, std::size_t i) {
    return {data_.data() + (k * n_components_ + i) * count(), count()};
}

double AuxiliaryStates::W(std::size_t k, std::size_t i, int p) const {
    const double s = static_cast<double>(k) * grid_.dt();
    return scaled(k, i)[static_cast<std::size_t>(p - 2)] * std::pow(s, p - 1);
}

void advance_W_into(const AuxiliaryStates& states, std::size_t k, std::span<const double> x_k,
                    std::span<const double> x_next, std::span<double> out) {
    const std::size_t n = states.n_components();
    const std::size_t m = states.count();
    if (x_k.size() != n || x_next.size() != n || out.size() != n * m) {
        throw DimensionError("advance_W: state or buffer size mismatch");
    }
    if (k + 1 >= states.grid().n_nodes()) throw DimensionError("advance_W: node past grid end");
    // With x linear on [s_k, s_k+1] and r = s_k / s_k+1 the exact step is
    //   Y_p(k+1) = r^(p-1) Y_p(k) - (E_p x_k + G_p x_k+1) / p,
    //   E_p = sum_{j=0}^{p-2} (r^j - r^(p-1)),  G_p = sum_{j=1}^{p-1} (1 - r^j),
    // both sums of non-negative terms, so the recurrences below do not cancel.
    const double kd = static_cast<double>(k);
    const double r = kd / (kd + 1.0);
    const double one_minus_r = 1.0 / (kd + 1.0);
    std::vector<double> e(m);
    std::vector<double> g(m);
    std::vector<double> r_pow(m);  // r^(p-1)
    double E = one_minus_r;
    double G = one_minus_r;
    double one_minus_rp = one_minus_r * (1.0 + r);  // 1 - r^p
    double rp1 = r;
    for (std::size_t j = 0; j < m; ++j) {
        const double p = static_cast<double>(j + 2);
        e[j] = E / p;
        g[j] = G / p;
        r_pow[j] = rp1;
        E += p * rp1 * one_minus_r;
        G += one_minus_rp;
        rp1 *= r;
        one_minus_rp += rp1 * one_minus_r;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::span<double> y_next = out.subspan(i * m, m);
        const std::span<const double> y = states.scaled(k, i);
        for (std::size_t j = 0; j < m; ++j) {
            y_next[j] = r_pow[j] * y[j] - (e[j] * x_k[i] + g[j] * x_next[i]);
        }
    }
}

void advance_W(AuxiliaryStates& states, std::size_t k, std::span<const double> x_k,
               std::span<const double> x_next) {
    const std::size_t n = states.n_components();
    std::vector<double> row(n * states.count());
    advance_W_into(states, k, x_k, x_next, row);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<double> dst = states.scaled(k + 1, i);
        std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(i * states.count()), states.count(),
                    dst.begin());
    }
}

AuxiliaryStates integrate_W(const TimeGrid& grid, const Trajectory& x, int p_max) {
    if (x.n_nodes() != grid.n_nodes()) throw DimensionError("integrate_W: trajectory length");
    AuxiliaryStates states(grid, x.dim(), p_max);
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) advance_W(states, k, x.row(k), x.row(k + 1));
    return states;
}

double correction_k(double s, double x_i, double x_i_initial, const ExpansionCoeffs& coeffs,
                    std::span<const double> scaled_W) {
    if (!(s > 0.0)) throw SingularPoint("correction_k: evaluated at t = t0");
    const std::size_t m = std::min(scaled_W.size(), coeffs.c.size());
    double memory = 0.0;
    for (std::size_t j = 0; j < m; ++j) memory += coeffs.c[j] * scaled_W[j];
    const double initial_term = x_i_initial / gamma(1.0 - coeffs.q);
    return std::pow(s, -coeffs.q) * (-initial_term + coeffs.a * x_i - memory);
}

TransformedField::TransformedField(FractionalPlant plant, const Truncation& truncation, double t0)
    : plant_(std::move(plant)), truncation_(truncation), t0_(t0) {
    // Orders are summed concurrently; each long series is independent.
    std::vector<std::future<ExpansionCoeffs>> pending;
    for (double q : plant_.orders()) {
        pending.push_back(std::async(std::launch::async, [q, &truncation] {
            return ExpansionCoeffs::compute(q, truncation);
        }));
        inv_gamma_one_minus_q_.push_back(1.0 / gamma(1.0 - q));
    }
    for (auto& f : pending) coeffs_.push_back(f.get());
}

void TransformedField::evaluate(double t, std::span<const double> x,
                                std::span<const double> scaled_row, std::span<const double> u,
                                std::span<double> out) const {
    const std::size_t n = plant_.n_states();
    const std::size_t m = static_cast<std::size_t>(truncation_.p_max - 1);
    if (x.size() != n || out.size() != n || scaled_row.size() != n * m) {
        throw DimensionError("f_tilde: state or auxiliary row size mismatch");
    }
    const double s = t - t0_;
    if (!(s > 0.0)) throw SingularPoint("f_tilde: evaluated at t = t0");
    plant_.dynamics(t, x, u, out);
    const std::span<const double> x0 = plant_.initial_state();
    for (std::size_t i = 0; i < n; ++i) {
        const ExpansionCoeffs& c = coeffs_[i];
        double memory = 0.0;
        const std::span<const double> y = scaled_row.subspan(i * m, m);
        for (std::size_t j = 0; j < m; ++j) memory += c.c[j] * y[j];
        const double k_i =
            std::pow(s, -c.q) * (-x0[i] * inv_gamma_one_minus_q_[i] + c.a * x[i] - memory);
        out[i] = (out[i] - k_i) / (c.b * std::pow(s, 1.0 - c.q));
    }
}

std::vector<double> f_tilde(const TransformedField& field, const AuxiliaryStates& states,
                            std::size_t k, double t, std::span<const double> x,
                            std::span<const double> u) {
    const std::size_t n = states.n_components();
    const std::size_t m = states.count();
    std::vector<double> row(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = states.scaled(k, i);
        std::copy(src.begin(), src.end(), row.begin() + static_cast<std::ptrdiff_t>(i * m));
    }
    std::vector<double> out(n);
    field.evaluate(t, x, row, u, out);
    return out;
}

}  // namespace frachjb
