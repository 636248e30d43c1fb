#include "frachjb/plant.hpp"

#include <cmath>
#include <string>

#include "frachjb/errors.hpp"

namespace frachjb {

FractionalPlant::FractionalPlant(std::vector<double> orders, std::vector<double> initial_state,
                                 std::size_t n_controls, VectorField field)
    : orders_(std::move(orders)),
      initial_state_(std::move(initial_state)),
      n_controls_(n_controls),
      field_(std::move(field)) {
    if (orders_.empty()) throw DimensionError("plant: at least one state is required");
    if (initial_state_.size() != orders_.size()) {
        throw DimensionError("plant: " + std::to_string(orders_.size()) + " orders but " +
                             std::to_string(initial_state_.size()) + " initial values");
    }
    for (double q : orders_) {
        if (!(q > 0.0 && q < 1.0)) {
            throw DomainError("plant: derivative orders must lie in (0, 1), got " + std::to_string(q));
        }
    }
    for (double x : initial_state_) {
        if (!std::isfinite(x)) throw DomainError("plant: initial state must be finite");
    }
    if (!field_) throw DomainError("plant: dynamics function is empty");
}

}  // namespace frachjb
