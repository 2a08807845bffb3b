#pragma once

// Discrete convolution approximations of the Caputo derivative of order
// alpha and of the Abel integral operator, plus the end-point functionals
// that appear in the adjoint of the Caputo derivative.
//
// Both weight families approximate
//     d^alpha/dt^alpha u (t_n) = I^{1-alpha}[u'](t_n) ~ sum_{j=0}^n b_j^n u'(t_{n-j}).

#include <cstddef>
#include <span>
#include <vector>

#include "fracwave/types.hpp"

namespace fracwave {

enum class Scheme { L1Type, Galerkin };

const char* to_string(Scheme scheme) noexcept;
Scheme scheme_from_string(const std::string& name);

/// L1-type weights b_0^n..b_n^n built from trapezoidal velocities.
std::vector<double> l1_weights(Alpha alpha, double dt, std::size_t n);

/// Galerkin (piecewise-constant) Abel weights b_0..b_max_lag; stationary in n.
std::vector<double> galerkin_weights(Alpha alpha, double dt, std::size_t max_lag);

/// Weight table for one (scheme, alpha, dt) triple, precomputed up to
/// max_n. Immutable after construction and safe to share between threads.
class ConvolutionWeights {
public:
    ConvolutionWeights(Scheme scheme, Alpha alpha, double dt, std::size_t max_n);

    Scheme scheme() const noexcept { return scheme_; }
    Alpha alpha() const noexcept { return alpha_; }
    double dt() const noexcept { return dt_; }
    std::size_t max_n() const noexcept { return max_n_; }

    /// b_lag^n for 0 <= lag <= n <= max_n.
    double weight(std::size_t lag, std::size_t n) const;

    /// Writes b_0^n..b_n^n into out (resized to n+1).
    void fill(std::size_t n, std::vector<double>& out) const;

    /// Lag-indexed table. For L1Type the entry at lag n is only valid as an
    /// interior weight; use weight(n, n) for the tail.
    std::span<const double> stationary() const noexcept { return table_; }

private:
    Scheme scheme_;
    Alpha alpha_;
    double dt_;
    std::size_t max_n_;
    std::vector<double> table_;
};

/// sum_{j=0}^n b_j^n v_{n-j}; history columns hold v_0, v_1, ...
Vector apply_frac_convolution(const ConvolutionWeights& weights, const Matrix& velocity_history,
                              std::size_t n);

/// Lower-triangular J x J matrix A with A(n, n-l) = b^_l (Galerkin weights).
Matrix quadrature_gram(Alpha alpha, double dt, std::size_t J);

/// Node weights of (1/Gamma(1-alpha)) int_0^T t^{-alpha} u(t) dt for the
/// piecewise-linear interpolant of u on the grid (kernel integrated exactly).
std::vector<double> abel_node_weights(Alpha alpha, const TimeGrid& grid);

/// (1/Gamma(1-alpha)) int_0^T t^{-alpha} u(t) dt; samples columns are u(t_i).
Vector tilde_I_alpha(Alpha alpha, const TimeGrid& grid, const Matrix& samples);

/// (1/Gamma(1-alpha)) int_0^T (T-s)^{-alpha} z(s) ds; time-reflected tilde_I_alpha.
Vector hat_I_alpha(Alpha alpha, const TimeGrid& grid, const Matrix& samples);

}  // namespace fracwave
