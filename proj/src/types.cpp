#include "fracwave/types.hpp"

#include <cmath>

namespace fracwave {

Alpha::Alpha(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0))
        throw std::invalid_argument("alpha must lie in the open interval (0, 1), got " +
                                    std::to_string(value));
}

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("time step must be positive, got " + std::to_string(dt));
    if (n_steps < 1) throw std::invalid_argument("time grid needs at least one step");
}

TimeGrid TimeGrid::over(double horizon, std::size_t n_steps) {
    if (n_steps < 1) throw std::invalid_argument("time grid needs at least one step");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    return TimeGrid(horizon / static_cast<double>(n_steps), n_steps);
}

double TimeGrid::trapezoid_weight(std::size_t i) const noexcept {
    if (i > n_steps_) return 0.0;
    return (i == 0 || i == n_steps_) ? 0.5 * dt_ : dt_;
}

SolveError::SolveError(const std::string& what, double residual, long step)
    : std::runtime_error(what + " (residual " + std::to_string(residual) +
                         (step >= 0 ? ", step " + std::to_string(step) : std::string()) + ")"),
      residual_(residual),
      step_(step) {}

}  // namespace fracwave
