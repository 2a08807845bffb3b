#pragma once

// Closed-form solution of the scalar relaxation problem
//     w'' + A d^{1/2}/dt^{1/2} w + B w = 0,  w(0) = 1, w'(0) = 0
// for A = 4/3^{3/4}, B = 1, and the separable 2D field built from it.

#include <complex>

#include "fracwave/types.hpp"

namespace fracwave::oracle {

/// Coefficients for which the closed form is known.
struct RelaxationParams {
    double alpha = 0.5;
    double A = 0.0;
    double B = 1.0;

    static RelaxationParams closed_form();
    /// Throws std::invalid_argument unless (alpha, A, B) = (1/2, 4/3^{3/4}, 1).
    void require_closed_form() const;
};

/// Oscillatory part from the two complex poles.
double residue_part(double t);
/// Real-axis branch-cut contribution int_0^inf e^{-rt} H(r) dr.
double spectral_part(double t);

/// w(t), absolute accuracy 1e-10. Throws for t < 0.
double exact_w_half(double t);
/// w'(t), absolute accuracy 1e-8. Throws for t <= 0.
double exact_dw_half(double t);
/// w''(t) for t > 0.
double exact_ddw_half(double t);

/// w(t) sin(pi x) sin(pi y) on the unit square.
double exact_field(double x, double y, double t);

/// Coefficients of u_tt + b d^{1/2} (-Lap) u + c2 (-Lap) u = 0 on the unit
/// square that reduce the first eigenmode (eigenvalue 2 pi^2) to the scalar
/// problem: c2 = B / (2 pi^2), b = A / (2 pi^2).
struct ModeCoefficients {
    double c2 = 0.0;
    double b = 0.0;
};
ModeCoefficients unit_square_mode_coefficients();

/// Upper pole of the Laplace-domain symbol.
std::complex<double> pole_plus();

/// w'' + A I^{1/2}[w'] + B w at t > 0, Abel term by adaptive quadrature.
double relaxation_residual(double t);

}  // namespace fracwave::oracle
