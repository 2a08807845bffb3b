#pragma once

// Forward model on the structured square, observation on Sigma, and the
// adjoint machinery turning trace residuals into H^1_0 gradients.

#include <memory>
#include <optional>

#include "fracwave/fem.hpp"
#include "fracwave/fracquad.hpp"
#include "fracwave/linsolve.hpp"
#include "fracwave/prior.hpp"
#include "fracwave/timestepper.hpp"

namespace fracwave {

/// Values on the Sigma nodes (rows) at every grid node (columns).
struct ObservationTrace {
    Matrix values;
    TimeGrid grid;

    ObservationTrace(Matrix v, const TimeGrid& g);
    static ObservationTrace zeros(std::size_t sigma_nodes, const TimeGrid& g);
    std::size_t sigma_nodes() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

struct WavePhysics {
    Alpha alpha{0.5};
    /// squared wave speed
    double c2 = 1.0;
    /// damping coefficient of the fractional term
    double b = 0.1;
};

/// M, b K, c^2 K on the mesh, each with homogeneous Dirichlet elimination.
SemidiscreteSystem wave_system(const StructuredMesh& mesh, const WavePhysics& physics);

/// Everything that stays fixed while u0 varies: mesh, Sigma, grid, Dirichlet
/// matrices and the factored step operator.
class WaveModel {
public:
    WaveModel(StructuredMesh mesh, SurfaceSampler sampler, TimeGrid grid, WavePhysics physics,
              Scheme scheme = Scheme::Galerkin, NewmarkParams params = {},
              Formulation formulation = Formulation::EffectiveMass,
              SpdSolver::Method solver = SpdSolver::Method::Auto);
    WaveModel(const WaveModel&) = delete;
    WaveModel& operator=(const WaveModel&) = delete;

    const StructuredMesh& mesh() const noexcept { return mesh_; }
    const SurfaceSampler& sampler() const noexcept { return sampler_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    const WavePhysics& physics() const noexcept { return physics_; }
    Scheme scheme() const noexcept { return weights_.scheme(); }
    const NewmarkParams& params() const noexcept { return params_; }
    Formulation formulation() const noexcept { return formulation_; }
    const SemidiscreteSystem& system() const noexcept { return system_; }
    const ConvolutionWeights& weights() const noexcept { return weights_; }
    std::size_t dofs() const noexcept { return mesh_.node_count(); }

    /// Dirichlet-eliminated P1 mass and Laplacian.
    const SparseMatrix& mass() const noexcept { return mass_; }
    const SparseMatrix& laplacian() const noexcept { return laplacian_; }

    /// Forward run from (u0, 0); boundary entries of u0 are ignored.
    StateHistory solve(const Vector& u0) const;
    /// Run with zero initial data driven by per-step loads, over n_steps.
    StateHistory solve_loaded(const Matrix& loads) const;

    Matrix observe(const StateHistory& history) const;
    Matrix observe(const Vector& u0) const { return observe(solve(u0)); }

    /// Solves laplacian() x = rhs with rhs zeroed on the boundary.
    Vector riesz(const Vector& rhs) const;
    /// a^T laplacian() b
    double h1_inner(const Vector& a, const Vector& b) const;

    /// sum_n tau_n sum_k W_k f_{k,n} g_{k,n}
    double trace_inner(const Matrix& f, const Matrix& g) const;

    /// Zeroes the boundary entries.
    Vector restrict_interior(Vector field) const;

private:
    StructuredMesh mesh_;
    SurfaceSampler sampler_;
    TimeGrid grid_;
    WavePhysics physics_;
    NewmarkParams params_;
    Formulation formulation_;
    SparseMatrix mass_, laplacian_;
    SemidiscreteSystem system_;
    ConvolutionWeights weights_;
    std::unique_ptr<NewmarkIntegrator> integrator_;
    SpdSolver riesz_solver_;
};

enum class AdjointDiscretization {
    /// Time-flipped adjoint PDE with surface source w(T - t), stepped by the
    /// forward scheme; gradient from z_t(T) and the reflected Abel integral.
    Continuous,
    /// Same flipped Newmark run, sources weighted by the trapezoid rule and
    /// shifted by one step, read out through alternating sums. Transpose
    /// exact for Galerkin weights with beta = 1/4, gamma = 1/2.
    Consistent,
};

const char* to_string(AdjointDiscretization d) noexcept;
AdjointDiscretization adjoint_discretization_from_string(const std::string& name);
/// Consistent where it is exact for the model's scheme, else Continuous.
AdjointDiscretization default_adjoint(const WaveModel& model) noexcept;

/// Time-flipped adjoint history zbar(t) = z(T - t).
struct AdjointState {
    StateHistory history;
    AdjointDiscretization discretization;
};

/// zbar for the source w (trace-space residual, already scaled by the noise
/// precision).
AdjointState solve_adjoint(const WaveModel& model, const ObservationTrace& w,
                           AdjointDiscretization discretization);

/// Derivative functional in nodal coordinates: d/du0 of <G u0, w>.
Vector adjoint_dual(const WaveModel& model, const AdjointState& state);

/// H^1_0 Riesz representative ztilde of the adjoint derivative.
Vector gradient_riesz(const WaveModel& model, const AdjointState& state);

/// Independent Gaussian noise with standard deviation sigma on the
/// W_Sigma-weighted trace space.
struct NoiseModel {
    double sigma = 1.0;
};

struct GradientResult {
    double cost = 0.0;
    double misfit = 0.0;
    double prior = 0.0;
    /// Nodal derivative vector dJ, so that dJ . du = J'(u0) du.
    Vector derivative;
    /// H^1_0 representative: laplacian() gradient = derivative.
    Vector gradient;
};

/// Misfit, prior and both gradient representations at u0. prior may be null
/// (pure misfit).
GradientResult compute_gradient(const WaveModel& model, const Vector& u0,
                                const ObservationTrace& y_delta, const BiLaplacianPrior* prior,
                                NoiseModel noise, const Vector& u0_star,
                                AdjointDiscretization discretization);

/// 1/2 <Gu0 - y, Gu0 - y> / sigma^2 for a precomputed trace.
double misfit_value(const WaveModel& model, const Matrix& trace, const ObservationTrace& y,
                    NoiseModel noise);

struct IdentityGap {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
};

/// lhs = <G du0, w> on Sigma x (0,T); rhs = <du0, G* w>_{H^1_0} through the
/// continuous adjoint.
IdentityGap adjoint_identity_check(const WaveModel& model, const Vector& direction,
                                   const ObservationTrace& w);

}  // namespace fracwave
