#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fracwave {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Compressed row storage.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Fractional order of the damping term, strictly inside (0, 1).
class Alpha {
public:
    explicit Alpha(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Equidistant time grid t_i = i * dt, i = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double dt, std::size_t n_steps);

    /// Grid with n_steps cells covering [0, horizon].
    static TimeGrid over(double horizon, std::size_t n_steps);

    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
    double horizon() const noexcept { return dt_ * static_cast<double>(n_steps_); }
    double t(std::size_t i) const noexcept { return dt_ * static_cast<double>(i); }

    /// Trapezoidal quadrature weight of node i on [0, horizon].
    double trapezoid_weight(std::size_t i) const noexcept;

private:
    double dt_;
    std::size_t n_steps_;
};

/// A linear solve failed or produced a residual above tolerance.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, double residual, long step = -1);
    double residual() const noexcept { return residual_; }
    /// Time step at which the failure happened, or -1 outside a time loop.
    long step() const noexcept { return step_; }

private:
    double residual_;
    long step_;
};

}  // namespace fracwave
