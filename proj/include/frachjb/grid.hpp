#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace frachjb {

/// Uniform sampling of [t0, tf]. Node k sits at t0 + k*dt, computed from the
/// index so spacing never accumulates rounding.
class TimeGrid {
public:
    /// Requires tf > t0, dt > 0 and (tf - t0)/dt integral to one part in 1e9.
    TimeGrid(double t0, double tf, double dt);

    double t0() const noexcept { return t0_; }
    double tf() const noexcept { return tf_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_nodes() const noexcept { return n_steps_ + 1; }

    /// Time at node k.
    double node(std::size_t k) const noexcept;

    bool operator==(const TimeGrid&) const = default;

private:
    double t0_;
    double tf_;
    double dt_;
    std::size_t n_steps_;
};

/// Scalar samples, one per grid node.
class SampledFunction {
public:
    SampledFunction(TimeGrid grid, std::vector<double> values);

    template <typename F>
    static SampledFunction from(const TimeGrid& grid, F&& f) {
        std::vector<double> v(grid.n_nodes());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.node(k));
        return SampledFunction(grid, std::move(v));
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Vector-valued samples: row k holds the dim components at node k.
class Trajectory {
public:
    Trajectory(std::size_t n_nodes, std::size_t dim, double fill = 0.0)
        : n_nodes_(n_nodes), dim_(dim), data_(n_nodes * dim, fill) {}

    std::size_t n_nodes() const noexcept { return n_nodes_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<double> row(std::size_t k) { return {data_.data() + k * dim_, dim_}; }
    std::span<const double> row(std::size_t k) const { return {data_.data() + k * dim_, dim_}; }
    double& at(std::size_t k, std::size_t i) { return data_[k * dim_ + i]; }
    double at(std::size_t k, std::size_t i) const { return data_[k * dim_ + i]; }

    /// Component i as a standalone series.
    std::vector<double> column(std::size_t i) const;

    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Trajectory&) const = default;

private:
    std::size_t n_nodes_;
    std::size_t dim_;
    std::vector<double> data_;
};

}  // namespace frachjb
