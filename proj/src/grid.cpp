#include "frachjb/grid.hpp"

#include <cmath>
#include <string>

#include "frachjb/errors.hpp"

namespace frachjb {

TimeGrid::TimeGrid(double t0, double tf, double dt) : t0_(t0), tf_(tf), dt_(dt), n_steps_(0) {
    if (!(std::isfinite(t0) && std::isfinite(tf) && std::isfinite(dt))) {
        throw DomainError("TimeGrid: non-finite bounds or step");
    }
    if (!(tf > t0)) throw DomainError("TimeGrid: tf must exceed t0");
    if (!(dt > 0.0)) throw DomainError("TimeGrid: dt must be positive");
    const double span = tf - t0;
    const double steps = std::round(span / dt);
    if (steps < 1.0 || std::abs(t0 + steps * dt - tf) > 1e-9 * span) {
        throw DomainError("TimeGrid: dt = " + std::to_string(dt) +
                          " does not divide [t0, tf] into whole steps");
    }
    n_steps_ = static_cast<std::size_t>(steps);
}

double TimeGrid::node(std::size_t k) const noexcept {
    return t0_ + static_cast<double>(k) * dt_;
}

SampledFunction::SampledFunction(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_nodes()) {
        throw DimensionError("SampledFunction: expected " + std::to_string(grid_.n_nodes()) +
                             " samples, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("SampledFunction: non-finite sample");
    }
}

std::vector<double> Trajectory::column(std::size_t i) const {
    std::vector<double> out(n_nodes_);
    for (std::size_t k = 0; k < n_nodes_; ++k) out[k] = at(k, i);
    return out;
}

}  // namespace frachjb
