#pragma once

// Newmark time integration of
//     M a + C sum_j b_j^{n} v_{n-j} + K d = f
// with the fractional damping term replaced by a discrete convolution over
// the full velocity history.

#include <functional>
#include <optional>
#include <vector>

#include "fracwave/fracquad.hpp"
#include "fracwave/linsolve.hpp"
#include "fracwave/types.hpp"

namespace fracwave {

struct NewmarkParams {
    double beta = 0.25;
    double gamma = 0.5;

    void validate() const;
    bool is_average_acceleration() const noexcept { return beta == 0.25 && gamma == 0.5; }
};

enum class Formulation { EffectiveMass, EffectiveStiffness };

const char* to_string(Formulation f) noexcept;
Formulation formulation_from_string(const std::string& name);

/// How f_{n+1} is obtained from a time-continuous load.
enum class ForcingRule {
    /// f_{n+1} = f(t_{n+1})
    Pointwise,
    /// (f_n + f_{n+1}) / 2 equals the cell average of f (Gauss quadrature).
    CellAveraged,
};

const char* to_string(ForcingRule r) noexcept;
ForcingRule forcing_rule_from_string(const std::string& name);

/// Right-hand side source: zero, a function of time, or precomputed loads
/// for every grid node.
class Forcing {
public:
    using Function = std::function<Vector(double)>;

    Forcing() = default;
    static Forcing zero() { return {}; }
    static Forcing function(Function f);
    /// Column n is the load at step n.
    static Forcing sampled(Matrix loads);

    bool is_zero() const noexcept { return !fn_ && !loads_; }
    bool is_sampled() const noexcept { return loads_.has_value(); }

    /// Load sequence f_0..f_N on the grid under the given rule.
    Matrix discretize(const TimeGrid& grid, Eigen::Index dim, ForcingRule rule) const;

private:
    Function fn_;
    std::optional<Matrix> loads_;
};

/// The ODE system M u'' + d^alpha/dt^alpha C u + K u = f.
struct SemidiscreteSystem {
    SparseMatrix mass;
    SparseMatrix damping;
    SparseMatrix stiffness;
    Forcing forcing;

    Eigen::Index dim() const noexcept { return mass.rows(); }
    void validate() const;
};

/// Displacement, velocity and acceleration for steps 0..N as matrix columns.
struct StateHistory {
    TimeGrid grid;
    Matrix d, v, a;

    StateHistory(const TimeGrid& g, Eigen::Index dim);
    std::size_t steps() const noexcept { return grid.n_steps(); }
    Eigen::Index dim() const noexcept { return d.rows(); }
};

/// Solves M a0 = f0 - K u0. The Caputo term of a function with prescribed
/// initial data vanishes at t = 0, so v0 does not enter.
Vector initial_acceleration(const SemidiscreteSystem& system, const Vector& u0, const Vector& v0,
                            const Vector& f0);

/// Reusable stepping machinery for one (system, params, weights) triple. The
/// effective matrices are constant in time and factored lazily once.
class NewmarkIntegrator {
public:
    NewmarkIntegrator(const SemidiscreteSystem& system, NewmarkParams params,
                      const ConvolutionWeights& weights,
                      SpdSolver::Method solver = SpdSolver::Method::Auto);

    const SemidiscreteSystem& system() const noexcept { return *system_; }
    const NewmarkParams& params() const noexcept { return params_; }
    const ConvolutionWeights& weights() const noexcept { return *weights_; }

    Vector initial_acceleration(const Vector& u0, const Vector& f0) const;

    /// Advances history from column n to n+1 by solving for the acceleration
    /// with M* = M + b_0 gamma dt C + beta dt^2 K.
    void step_effective_mass(StateHistory& history, std::size_t n, const Vector& f_next) const;

    /// Same contract, solving for the displacement with
    /// K* = K + b_0 gamma/(beta dt) C + M/(beta dt^2). Requires beta > 0.
    void step_effective_stiffness(StateHistory& history, std::size_t n, const Vector& f_next) const;

    void step(Formulation f, StateHistory& history, std::size_t n, const Vector& f_next) const;

    /// || M a_n + C sum_j b_j^n v_{n-j} + K d_n - f_n ||_2
    double residual(const StateHistory& history, std::size_t n, const Vector& f_n) const;

private:
    const SparseMatrix& effective_mass() const;
    const SpdSolver& mass_solver() const;
    const SpdSolver& effective_mass_solver() const;
    const SpdSolver& effective_stiffness_solver() const;
    /// sum_{j=1}^{n} b_j^n v_{n-j} from the stored history.
    Vector history_term(const StateHistory& history, std::size_t n) const;

    const SemidiscreteSystem* system_;
    NewmarkParams params_;
    const ConvolutionWeights* weights_;
    SpdSolver::Method solver_method_;
    mutable std::optional<SpdSolver> mass_solver_;
    mutable std::optional<SpdSolver> eff_mass_solver_;
    mutable std::optional<SpdSolver> eff_stiff_solver_;
};

struct RunOptions {
    Formulation formulation = Formulation::EffectiveMass;
    ForcingRule forcing_rule = ForcingRule::Pointwise;
    SpdSolver::Method solver = SpdSolver::Method::Auto;
    /// When set, every step's discrete residual is checked against
    /// residual_tolerance * (1 + max ||f_n||) and a SolveError is raised.
    bool check_residual = false;
    double residual_tolerance = 1e-10;
};

StateHistory run_forward(const SemidiscreteSystem& system, const NewmarkParams& params,
                         const ConvolutionWeights& weights, const TimeGrid& grid, const Vector& u0,
                         const Vector& v0, const RunOptions& options = {});

/// Convenience overload building the weight table for the grid.
StateHistory run_forward(const SemidiscreteSystem& system, const NewmarkParams& params,
                         Scheme scheme, Alpha alpha, const TimeGrid& grid, const Vector& u0,
                         const Vector& v0, const RunOptions& options = {});

/// Residual norms of the velocity-only three-stage form of the scheme for
/// n = 1..N-1 (entry n-1). Only defined for beta = 1/4, gamma = 1/2 and
/// stationary (Galerkin) weights; loads are the f_n used by the run. The
/// n = 1 entry also uses the step-0 equation, which the initial acceleration
/// satisfies only when v_0 = 0 (it omits the b_0 C v_0 term).
std::vector<double> three_stage_residual(const StateHistory& history,
                                         const SemidiscreteSystem& system,
                                         const ConvolutionWeights& weights,
                                         const NewmarkParams& params, const Matrix& loads);

/// Discrete energies |M^{1/2} v^_n|^2 with v^_n = (v_{n+1}+v_n)/2, and
/// |K^{1/2} dt sum_{n=0}^{N} v~_n|^2, the quantities bounded by the discrete
/// stability estimate. N = steps - 1.
struct DiscreteEnergy {
    double kinetic_last = 0.0;
    double kinetic_max = 0.0;
    double potential = 0.0;
    double total() const noexcept { return kinetic_last + potential; }
};

DiscreteEnergy discrete_energy(const StateHistory& history, const SemidiscreteSystem& system);

}  // namespace fracwave
