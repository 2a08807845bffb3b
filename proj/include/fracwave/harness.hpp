#pragma once

// Executable checks of the stability analysis: the two summation lemmas,
// coercivity of the Galerkin quadrature, and convergence-order studies.

#include <cstdint>
#include <string>
#include <vector>

#include "fracwave/fracquad.hpp"
#include "fracwave/types.hpp"

namespace fracwave::harness {

struct LemmaGap {
    double lhs = 0.0;
    double rhs = 0.0;
    /// |lhs - rhs| for the telescoping identity, lhs - rhs for the partial-sum bound
    double gap = 0.0;
    /// max |w_n|^2, the natural size of both sides
    double scale = 0.0;
};

/// sum_{n=1}^N (w_{n+1} - w_{n-1}, (w_{n+1} + 2 w_n + w_{n-1})/4)
///   = |(w_{N+1} + w_N)/2|^2 - |(w_1 + w_0)/2|^2
LemmaGap telescoping_check(const std::vector<Vector>& w);

/// sum_{n=0}^N (sum_{j=1}^n (w_j + w_{j-1})/2, w_n)
///   >= 1/4 (|sum_n w_n|^2 - |w_0|^2)
LemmaGap partial_sum_check(const std::vector<Vector>& w);

/// Smallest eigenvalue of the symmetric part of quadrature_gram.
double gram_min_eigenvalue(Alpha alpha, double dt, std::size_t J);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Randomized lemma suite: trials sequences each with N <= 50, dim <= 8.
std::vector<CheckResult> lemma_suite(int trials, std::uint64_t seed);
/// Gram PSD checks for J in {8, 32, 64}, alpha in {0.1, 0.5, 0.9}.
std::vector<CheckResult> coercivity_suite();
/// Three-stage identity on a 50-step 2D run; value is the max relative residual.
CheckResult three_stage_check(int nx = 16, std::size_t steps = 50);

enum class Family {
    /// w'' + A d^{1/2} w + w = 0 against the closed form
    ScalarRelaxation,
    /// w'' + w = 0, w = cos t
    ClassicalWave,
    /// single Laplace eigenmode on the unit square, h refined with dt
    SingleMode2D,
};

const char* to_string(Family f) noexcept;
Family family_from_string(const std::string& name);

struct ConvergenceLevel {
    double dt = 0.0;
    /// max_n |M^{1/2} (e'_{n+1} + e'_n)/2|
    double kinetic = 0.0;
    /// |K^{1/2} (e_N + e_{N+1})/2|
    double potential = 0.0;
    /// max_n |e_n|_inf
    double max_displacement = 0.0;
};

struct ConvergenceReport {
    Family family = Family::ScalarRelaxation;
    Scheme scheme = Scheme::Galerkin;
    std::vector<ConvergenceLevel> levels;
    double order_kinetic = 0.0;
    double order_potential = 0.0;
    double order_max = 0.0;
    std::string norm = "discrete energy (kinetic, potential) and max displacement";

    /// min of the two energy orders
    double energy_order() const noexcept;
};

/// Least-squares slope of log(error) against log(dt).
double fit_order(const std::vector<double>& dts, const std::vector<double>& errors);

/// Runs every level to horizon T (plus one extra step for the end average).
/// For SingleMode2D, the mesh has round(base_cells * dts[0] / dt) cells per side.
ConvergenceReport convergence_study(Family family, const std::vector<double>& dts,
                                    Scheme scheme = Scheme::Galerkin, double horizon = 4.0,
                                    int base_cells = 16);

struct IdentityLevel {
    int cells = 0;
    double dt = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
};

/// Continuous-adjoint identity <G d, w> = <d, G* w> on the side-2 square,
/// Sigma radius 0.8, c^2 = 1, b = 0.1, for a Gaussian bump d and the source
/// w = sin(3t)(1 + x/2). Each further level halves both h and dt.
std::vector<IdentityLevel> adjoint_identity_study(int cells, std::size_t steps, double horizon,
                                                  int levels, double alpha = 0.5);

/// log2 of successive gap ratios.
std::vector<double> identity_orders(const std::vector<IdentityLevel>& levels);

}  // namespace fracwave::harness
