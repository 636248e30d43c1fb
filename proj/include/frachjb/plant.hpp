#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace frachjb {

/// f(t, x, u) written into out (length = state dimension).
using VectorField = std::function<void(double t, std::span<const double> x,
                                       std::span<const double> u, std::span<double> out)>;

/// Caputo dynamics  D^{q_i} x_i = f_i(t, x, u),  x(t0) = x0,  0 < q_i < 1.
class FractionalPlant {
public:
    FractionalPlant(std::vector<double> orders, std::vector<double> initial_state,
                    std::size_t n_controls, VectorField field);

    std::size_t n_states() const noexcept { return orders_.size(); }
    std::size_t n_controls() const noexcept { return n_controls_; }
    std::span<const double> orders() const noexcept { return orders_; }
    std::span<const double> initial_state() const noexcept { return initial_state_; }

    void dynamics(double t, std::span<const double> x, std::span<const double> u,
                  std::span<double> out) const {
        field_(t, x, u, out);
    }

private:
    std::vector<double> orders_;
    std::vector<double> initial_state_;
    std::size_t n_controls_;
    VectorField field_;
};

}  // namespace frachjb
