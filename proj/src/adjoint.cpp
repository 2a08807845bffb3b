#include "fracwave/adjoint.hpp"

#include <cmath>
#include <stdexcept>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

Vector mul(const SparseMatrix& A, const Vector& x) { return kernels::spmv(A, x); }

SparseMatrix scaled_dirichlet(const SparseMatrix& A, double s, const std::vector<int>& boundary) {
    SparseMatrix scaled = s * A;
    return apply_dirichlet(scaled, boundary);
}

// sum_{k=0}^{L} (-1)^k x_{L-k} over the columns of x.
Vector alternating_sum(const Matrix& x) {
    Vector out = Vector::Zero(x.rows());
    const Eigen::Index L = x.cols() - 1;
    for (Eigen::Index k = 0; k <= L; ++k) {
        if (k % 2 == 0)
            out += x.col(L - k);
        else
            out -= x.col(L - k);
    }
    return out;
}

}  // namespace

ObservationTrace::ObservationTrace(Matrix v, const TimeGrid& g) : values(std::move(v)), grid(g) {
    if (static_cast<std::size_t>(values.cols()) != grid.n_nodes())
        throw std::invalid_argument("observation trace needs one column per time node");
}

ObservationTrace ObservationTrace::zeros(std::size_t sigma_nodes, const TimeGrid& g) {
    return {Matrix::Zero(static_cast<Eigen::Index>(sigma_nodes), static_cast<Eigen::Index>(g.n_nodes())), g};
}

SemidiscreteSystem wave_system(const StructuredMesh& mesh, const WavePhysics& physics) {
    if (!(physics.c2 > 0.0)) throw std::invalid_argument("squared wave speed must be positive");
    if (!(physics.b >= 0.0)) throw std::invalid_argument("damping coefficient must be nonnegative");
    const SparseMatrix K = assemble_stiffness(mesh);
    SemidiscreteSystem sys;
    sys.mass = apply_dirichlet(assemble_mass(mesh), mesh.boundary_nodes());
    sys.damping = scaled_dirichlet(K, physics.b, mesh.boundary_nodes());
    sys.stiffness = scaled_dirichlet(K, physics.c2, mesh.boundary_nodes());
    return sys;
}

WaveModel::WaveModel(StructuredMesh mesh, SurfaceSampler sampler, TimeGrid grid, WavePhysics physics,
                     Scheme scheme, NewmarkParams params, Formulation formulation, SpdSolver::Method solver)
    : mesh_(std::move(mesh)),
      sampler_(std::move(sampler)),
      grid_(grid),
      physics_(physics),
      params_(params),
      formulation_(formulation),
      mass_(apply_dirichlet(assemble_mass(mesh_), mesh_.boundary_nodes())),
      laplacian_(apply_dirichlet(assemble_stiffness(mesh_), mesh_.boundary_nodes())),
      weights_(scheme, physics.alpha, grid.dt(), grid.n_steps() + 1),
      riesz_solver_(laplacian_, solver) {
    system_ = wave_system(mesh_, physics);
    integrator_ = std::make_unique<NewmarkIntegrator>(system_, params_, weights_, solver);
}

Vector WaveModel::restrict_interior(Vector field) const {
    if (static_cast<std::size_t>(field.size()) != dofs()) throw std::invalid_argument("field size does not match the mesh");
    for (int b : mesh_.boundary_nodes()) field[b] = 0.0;
    return field;
}

StateHistory WaveModel::solve(const Vector& u0) const {
    StateHistory h(grid_, static_cast<Eigen::Index>(dofs()));
    h.d.col(0) = restrict_interior(u0);
    const Vector zero = Vector::Zero(h.dim());
    h.a.col(0) = integrator_->initial_acceleration(h.d.col(0), zero);
    for (std::size_t n = 0; n < grid_.n_steps(); ++n) {
        try {
            integrator_->step(formulation_, h, n, zero);
        } catch (const SolveError& e) {
            throw SolveError(e.what(), e.residual(), static_cast<long>(n + 1));
        }
    }
    return h;
}

StateHistory WaveModel::solve_loaded(const Matrix& loads) const {
    if (loads.rows() != static_cast<Eigen::Index>(dofs()) || loads.cols() < 2)
        throw std::invalid_argument("loads must have one row per node and at least two steps");
    const auto steps = static_cast<std::size_t>(loads.cols() - 1);
    if (steps > weights_.max_n()) throw std::invalid_argument("loaded run longer than the weight table");
    StateHistory h(TimeGrid(grid_.dt(), steps), loads.rows());
    h.a.col(0) = integrator_->initial_acceleration(h.d.col(0), loads.col(0));
    for (std::size_t n = 0; n < steps; ++n) {
        try {
            integrator_->step(formulation_, h, n, loads.col(static_cast<Eigen::Index>(n + 1)));
        } catch (const SolveError& e) {
            throw SolveError(e.what(), e.residual(), static_cast<long>(n + 1));
        }
    }
    return h;
}

Matrix WaveModel::observe(const StateHistory& history) const {
    Matrix out(static_cast<Eigen::Index>(sampler_.size()), history.d.cols());
    for (Eigen::Index n = 0; n < history.d.cols(); ++n)
        for (std::size_t k = 0; k < sampler_.size(); ++k)
            out(static_cast<Eigen::Index>(k), n) = history.d(sampler_.nodes()[k], n);
    return out;
}

Vector WaveModel::riesz(const Vector& rhs) const { return riesz_solver_.solve(restrict_interior(rhs)); }

double WaveModel::h1_inner(const Vector& a, const Vector& b) const { return a.dot(mul(laplacian_, b)); }

double WaveModel::trace_inner(const Matrix& f, const Matrix& g) const {
    const auto cols = static_cast<Eigen::Index>(grid_.n_nodes());
    const auto rows = static_cast<Eigen::Index>(sampler_.size());
    if (f.rows() != rows || g.rows() != rows || f.cols() != cols || g.cols() != cols)
        throw std::invalid_argument("trace_inner: traces do not match Sigma and the grid");
    double sum = 0.0;
    for (Eigen::Index n = 0; n < cols; ++n) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < rows; ++k) s += sampler_.weights()[static_cast<std::size_t>(k)] * f(k, n) * g(k, n);
        sum += grid_.trapezoid_weight(static_cast<std::size_t>(n)) * s;
    }
    return sum;
}

const char* to_string(AdjointDiscretization d) noexcept {
    return d == AdjointDiscretization::Continuous ? "continuous" : "consistent";
}

AdjointDiscretization adjoint_discretization_from_string(const std::string& name) {
    if (name == "continuous") return AdjointDiscretization::Continuous;
    if (name == "consistent") return AdjointDiscretization::Consistent;
    throw std::invalid_argument("unknown adjoint discretization '" + name + "' (expected continuous or consistent)");
}

AdjointDiscretization default_adjoint(const WaveModel& model) noexcept {
    return model.scheme() == Scheme::Galerkin && model.params().is_average_acceleration()
               ? AdjointDiscretization::Consistent
               : AdjointDiscretization::Continuous;
}

AdjointState solve_adjoint(const WaveModel& model, const ObservationTrace& w, AdjointDiscretization discretization) {
    const TimeGrid& grid = model.grid();
    if (w.sigma_nodes() != model.sampler().size() || w.grid.n_steps() != grid.n_steps())
        throw std::invalid_argument("adjoint source does not match Sigma and the grid");
    const std::size_t N = grid.n_steps();
    const auto dofs = static_cast<Eigen::Index>(model.dofs());
    auto load = [&](std::size_t n) { return surface_load(model.mesh(), model.sampler(), w.values.col(static_cast<Eigen::Index>(n))); };

    if (discretization == AdjointDiscretization::Continuous) {
        Matrix loads(dofs, static_cast<Eigen::Index>(N + 1));
        for (std::size_t n = 0; n <= N; ++n) loads.col(static_cast<Eigen::Index>(n)) = load(N - n);
        return {model.solve_loaded(loads), discretization};
    }
    if (model.scheme() != Scheme::Galerkin || !model.params().is_average_acceleration())
        throw std::invalid_argument("consistent adjoint needs Galerkin weights with beta = 1/4, gamma = 1/2");
    Matrix loads = Matrix::Zero(dofs, static_cast<Eigen::Index>(N + 2));
    for (std::size_t m = 1; m <= N + 1; ++m)
        loads.col(static_cast<Eigen::Index>(m)) = grid.trapezoid_weight(N + 1 - m) * load(N + 1 - m);
    return {model.solve_loaded(loads), discretization};
}

Vector adjoint_dual(const WaveModel& model, const AdjointState& state) {
    const auto& sys = model.system();
    const auto& h = state.history;
    if (state.discretization == AdjointDiscretization::Continuous) {
        const Vector abel = hat_I_alpha(model.physics().alpha, h.grid, h.d);
        const Vector vT = h.v.col(h.v.cols() - 1);
        return model.restrict_interior(mul(sys.mass, vT) + mul(sys.damping, abel));
    }
    const double dt = model.grid().dt();
    const auto b = model.weights().stationary();
    const Eigen::Index L = h.d.cols() - 1;
    // coefficient of d_m in the alternating sum of the convolution b * d
    std::vector<double> beta(static_cast<std::size_t>(L + 1));
    beta[0] = b[0];
    for (std::size_t l = 1; l < beta.size(); ++l) beta[l] = b[l] - beta[l - 1];
    Vector conv = Vector::Zero(h.dim());
    for (Eigen::Index m = 0; m <= L; ++m) conv += beta[static_cast<std::size_t>(L - m)] * h.d.col(m);
    const Vector dual = mul(sys.stiffness, alternating_sum(h.d)) +
                        (2.0 / dt) * (mul(sys.mass, alternating_sum(h.v)) + mul(sys.damping, conv));
    return model.restrict_interior(dual);
}

Vector gradient_riesz(const WaveModel& model, const AdjointState& state) {
    return model.riesz(adjoint_dual(model, state));
}

double misfit_value(const WaveModel& model, const Matrix& trace, const ObservationTrace& y, NoiseModel noise) {
    if (!(noise.sigma > 0.0)) throw std::invalid_argument("noise standard deviation must be positive");
    const Matrix r = trace - y.values;
    return 0.5 * model.trace_inner(r, r) / (noise.sigma * noise.sigma);
}

GradientResult compute_gradient(const WaveModel& model, const Vector& u0, const ObservationTrace& y_delta,
                                const BiLaplacianPrior* prior, NoiseModel noise, const Vector& u0_star,
                                AdjointDiscretization discretization) {
    if (!(noise.sigma > 0.0)) throw std::invalid_argument("noise standard deviation must be positive");
    GradientResult out;
    const Matrix trace = model.observe(u0);
    const Matrix residual = trace - y_delta.values;
    const double prec = 1.0 / (noise.sigma * noise.sigma);
    out.misfit = 0.5 * prec * model.trace_inner(residual, residual);
    const AdjointState state = solve_adjoint(model, ObservationTrace(prec * residual, model.grid()), discretization);
    out.derivative = adjoint_dual(model, state);
    if (prior) {
        const Vector diff = model.restrict_interior(u0 - u0_star);
        const Vector pdiff = prior->apply_inverse(diff);
        out.prior = 0.5 * diff.dot(pdiff);
        out.derivative += model.restrict_interior(pdiff);
    }
    out.cost = out.misfit + out.prior;
    out.gradient = model.riesz(out.derivative);
    return out;
}

IdentityGap adjoint_identity_check(const WaveModel& model, const Vector& direction, const ObservationTrace& w) {
    IdentityGap g;
    g.lhs = model.trace_inner(model.observe(direction), w.values);
    const AdjointState state = solve_adjoint(model, w, AdjointDiscretization::Continuous);
    g.rhs = model.restrict_interior(direction).dot(adjoint_dual(model, state));
    g.gap = std::abs(g.lhs - g.rhs);
    return g;
}

}  // namespace fracwave
