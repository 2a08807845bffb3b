#include "fracwave/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

Vector mul(const SparseMatrix& A, const Vector& x) { return kernels::spmv(A, x); }

std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

void NewmarkParams::validate() const {
    if (!(beta >= 0.0 && beta <= 0.5))
        throw std::invalid_argument("Newmark beta must lie in [0, 1/2], got " + std::to_string(beta));
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("Newmark gamma must lie in [0, 1], got " + std::to_string(gamma));
}

const char* to_string(Formulation f) noexcept {
    return f == Formulation::EffectiveMass ? "effective-mass" : "effective-stiffness";
}

Formulation formulation_from_string(const std::string& name) {
    if (name == "effective-mass" || name == "mass") return Formulation::EffectiveMass;
    if (name == "effective-stiffness" || name == "stiffness") return Formulation::EffectiveStiffness;
    throw std::invalid_argument("unknown formulation '" + name +
                                "' (expected effective-mass or effective-stiffness)");
}

const char* to_string(ForcingRule r) noexcept {
    return r == ForcingRule::Pointwise ? "pointwise" : "cell-averaged";
}

ForcingRule forcing_rule_from_string(const std::string& name) {
    if (name == "pointwise") return ForcingRule::Pointwise;
    if (name == "cell-averaged") return ForcingRule::CellAveraged;
    throw std::invalid_argument("unknown forcing rule '" + name + "' (expected pointwise or cell-averaged)");
}

Forcing Forcing::function(Function f) {
    Forcing out;
    out.fn_ = std::move(f);
    return out;
}

Forcing Forcing::sampled(Matrix loads) {
    Forcing out;
    out.loads_ = std::move(loads);
    return out;
}

Matrix Forcing::discretize(const TimeGrid& grid, Eigen::Index dim, ForcingRule rule) const {
    const auto cols = static_cast<Eigen::Index>(grid.n_nodes());
    if (loads_) {
        if (loads_->rows() != dim || loads_->cols() < cols)
            throw std::invalid_argument("sampled forcing does not cover the grid");
        return loads_->leftCols(cols);
    }
    Matrix f = Matrix::Zero(dim, cols);
    if (!fn_) return f;
    auto eval = [&](double t) {
        Vector v = fn_(t);
        if (v.size() != dim) throw std::invalid_argument("forcing function returned wrong size");
        return v;
    };
    f.col(0) = eval(0.0);
    if (rule == ForcingRule::Pointwise) {
        for (Eigen::Index n = 1; n < cols; ++n) f.col(n) = eval(grid.t(static_cast<std::size_t>(n)));
        return f;
    }
    using Rule = boost::math::quadrature::gauss<double, 7>;
    const double half = 0.5 * grid.dt();
    for (Eigen::Index n = 0; n + 1 < cols; ++n) {
        const double mid = grid.t(static_cast<std::size_t>(n)) + half;
        Vector avg = Vector::Zero(dim);
        for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
            const double x = Rule::abscissa()[i];
            const double w = Rule::weights()[i];
            if (x == 0.0)
                avg += w * eval(mid);
            else
                avg += w * (eval(mid - half * x) + eval(mid + half * x));
        }
        avg *= 0.5;
        f.col(n + 1) = 2.0 * avg - f.col(n);
    }
    return f;
}

void SemidiscreteSystem::validate() const {
    const auto n = mass.rows();
    for (const SparseMatrix* A : {&mass, &damping, &stiffness})
        if (A->rows() != n || A->cols() != n)
            throw std::invalid_argument("system matrices must be square and of equal size");
    if (n == 0) throw std::invalid_argument("empty system");
}

StateHistory::StateHistory(const TimeGrid& g, Eigen::Index dim)
    : grid(g),
      d(Matrix::Zero(dim, static_cast<Eigen::Index>(g.n_nodes()))),
      v(Matrix::Zero(dim, static_cast<Eigen::Index>(g.n_nodes()))),
      a(Matrix::Zero(dim, static_cast<Eigen::Index>(g.n_nodes()))) {}

Vector initial_acceleration(const SemidiscreteSystem& system, const Vector& u0, const Vector& /*v0*/,
                            const Vector& f0) {
    system.validate();
    SpdSolver solver(system.mass);
    return solver.solve(f0 - mul(system.stiffness, u0));
}

NewmarkIntegrator::NewmarkIntegrator(const SemidiscreteSystem& system, NewmarkParams params,
                                     const ConvolutionWeights& weights, SpdSolver::Method solver)
    : system_(&system), params_(params), weights_(&weights), solver_method_(solver) {
    system.validate();
    params.validate();
}

const SpdSolver& NewmarkIntegrator::mass_solver() const {
    if (!mass_solver_) mass_solver_.emplace(system_->mass, solver_method_);
    return *mass_solver_;
}

const SpdSolver& NewmarkIntegrator::effective_mass_solver() const {
    if (!eff_mass_solver_) {
        const double dt = weights_->dt();
        const double b0 = weights_->weight(0, 0);
        SparseMatrix Mstar = system_->mass + (b0 * params_.gamma * dt) * system_->damping +
                             (params_.beta * dt * dt) * system_->stiffness;
        eff_mass_solver_.emplace(Mstar, solver_method_);
    }
    return *eff_mass_solver_;
}

const SpdSolver& NewmarkIntegrator::effective_stiffness_solver() const {
    if (!(params_.beta > 0.0))
        throw std::invalid_argument("effective stiffness formulation requires beta > 0");
    if (!eff_stiff_solver_) {
        const double dt = weights_->dt();
        const double b0 = weights_->weight(0, 0);
        const double beta = params_.beta;
        SparseMatrix Kstar = system_->stiffness + (b0 * params_.gamma / (beta * dt)) * system_->damping +
                             (1.0 / (beta * dt * dt)) * system_->mass;
        eff_stiff_solver_.emplace(Kstar, solver_method_);
    }
    return *eff_stiff_solver_;
}

Vector NewmarkIntegrator::initial_acceleration(const Vector& u0, const Vector& f0) const {
    return mass_solver().solve(f0 - mul(system_->stiffness, u0));
}

Vector NewmarkIntegrator::history_term(const StateHistory& history, std::size_t n) const {
    std::vector<double> b;
    weights_->fill(n, b);
    Vector out(history.dim());
    kernels::parallel::lag_convolution(b, history.v, n, 1, view(out));
    return out;
}

void NewmarkIntegrator::step_effective_mass(StateHistory& h, std::size_t n, const Vector& f_next) const {
    const double dt = weights_->dt();
    const double beta = params_.beta, gamma = params_.gamma;
    const auto c = static_cast<Eigen::Index>(n);
    const Vector u_pred = h.d.col(c) + dt * h.v.col(c) + (0.5 - beta) * dt * dt * h.a.col(c);
    const Vector v_pred = h.v.col(c) + (1.0 - gamma) * dt * h.a.col(c);
    const double b0 = weights_->weight(0, n + 1);
    const Vector memory = b0 * v_pred + history_term(h, n + 1);
    const Vector rhs = f_next - mul(system_->stiffness, u_pred) - mul(system_->damping, memory);
    const Vector a = effective_mass_solver().solve(rhs);
    h.a.col(c + 1) = a;
    h.d.col(c + 1) = u_pred + beta * dt * dt * a;
    h.v.col(c + 1) = v_pred + gamma * dt * a;
}

void NewmarkIntegrator::step_effective_stiffness(StateHistory& h, std::size_t n, const Vector& f_next) const {
    const auto& solver = effective_stiffness_solver();
    const double dt = weights_->dt();
    const double beta = params_.beta, gamma = params_.gamma;
    const auto c = static_cast<Eigen::Index>(n);
    const Vector u_pred = h.d.col(c) + dt * h.v.col(c) + (0.5 - beta) * dt * dt * h.a.col(c);
    const Vector v_pred = h.v.col(c) + (1.0 - gamma) * dt * h.a.col(c);
    const double b0 = weights_->weight(0, n + 1);
    const double k = gamma / (beta * dt);
    const Vector memory = b0 * (v_pred - k * u_pred) + history_term(h, n + 1);
    const Vector rhs = f_next + (1.0 / (beta * dt * dt)) * mul(system_->mass, u_pred) -
                       mul(system_->damping, memory);
    const Vector d = solver.solve(rhs);
    const Vector a = (d - u_pred) / (beta * dt * dt);
    h.d.col(c + 1) = d;
    h.a.col(c + 1) = a;
    h.v.col(c + 1) = v_pred + gamma * dt * a;
}

void NewmarkIntegrator::step(Formulation f, StateHistory& h, std::size_t n, const Vector& f_next) const {
    if (f == Formulation::EffectiveMass)
        step_effective_mass(h, n, f_next);
    else
        step_effective_stiffness(h, n, f_next);
}

double NewmarkIntegrator::residual(const StateHistory& h, std::size_t n, const Vector& f_n) const {
    const auto c = static_cast<Eigen::Index>(n);
    const Vector memory = apply_frac_convolution(*weights_, h.v, n);
    return (mul(system_->mass, h.a.col(c)) + mul(system_->damping, memory) +
            mul(system_->stiffness, h.d.col(c)) - f_n)
        .norm();
}

StateHistory run_forward(const SemidiscreteSystem& system, const NewmarkParams& params,
                         const ConvolutionWeights& weights, const TimeGrid& grid, const Vector& u0,
                         const Vector& v0, const RunOptions& options) {
    system.validate();
    const Eigen::Index dim = system.dim();
    if (u0.size() != dim || v0.size() != dim)
        throw std::invalid_argument("initial data do not match the system size");
    if (weights.max_n() < grid.n_steps())
        throw std::invalid_argument("weight table shorter than the time grid");
    if (std::abs(weights.dt() - grid.dt()) > 1e-14 * grid.dt())
        throw std::invalid_argument("weight table and grid use different time steps");
    NewmarkIntegrator integrator(system, params, weights, options.solver);
    const Matrix loads = system.forcing.discretize(grid, dim, options.forcing_rule);
    StateHistory h(grid, dim);
    h.d.col(0) = u0;
    h.v.col(0) = v0;
    h.a.col(0) = integrator.initial_acceleration(u0, loads.col(0));
    double scale = 1.0;
    if (options.check_residual) {
        for (Eigen::Index n = 0; n < loads.cols(); ++n) scale = std::max(scale, 1.0 + loads.col(n).norm());
        scale = std::max(scale, mul(system.stiffness, u0).norm());
    }
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        try {
            integrator.step(options.formulation, h, n, loads.col(static_cast<Eigen::Index>(n + 1)));
        } catch (const SolveError& e) {
            throw SolveError(e.what(), e.residual(), static_cast<long>(n + 1));
        }
        if (options.check_residual) {
            const double r = integrator.residual(h, n + 1, loads.col(static_cast<Eigen::Index>(n + 1)));
            if (!(r <= options.residual_tolerance * scale))
                throw SolveError("discrete equation residual above tolerance", r / scale, static_cast<long>(n + 1));
        }
    }
    return h;
}

StateHistory run_forward(const SemidiscreteSystem& system, const NewmarkParams& params, Scheme scheme,
                         Alpha alpha, const TimeGrid& grid, const Vector& u0, const Vector& v0,
                         const RunOptions& options) {
    const ConvolutionWeights weights(scheme, alpha, grid.dt(), grid.n_steps());
    return run_forward(system, params, weights, grid, u0, v0, options);
}

std::vector<double> three_stage_residual(const StateHistory& h, const SemidiscreteSystem& system,
                                         const ConvolutionWeights& weights, const NewmarkParams& params,
                                         const Matrix& loads) {
    if (!params.is_average_acceleration())
        throw std::invalid_argument("three-stage form requires beta = 1/4 and gamma = 1/2");
    if (weights.scheme() != Scheme::Galerkin)
        throw std::invalid_argument("three-stage form requires stationary (Galerkin) weights");
    const std::size_t N = h.steps();
    if (N < 2) return {};
    if (weights.max_n() < N) throw std::invalid_argument("weight table shorter than the history");
    if (loads.cols() < static_cast<Eigen::Index>(N + 1) || loads.rows() != h.dim())
        throw std::invalid_argument("loads do not cover the history");
    const double dt = h.grid.dt();
    const auto b = weights.stationary();
    const Eigen::Index dim = h.dim();

    Matrix vt(dim, static_cast<Eigen::Index>(N));
    vt.col(0) = 0.5 * (h.v.col(1) + h.v.col(0));
    for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(N); ++i)
        vt.col(i) = 0.25 * (h.v.col(i + 1) + 2.0 * h.v.col(i) + h.v.col(i - 1));

    std::vector<double> out;
    out.reserve(N - 1);
    Vector displacement = h.d.col(0);
    Vector conv(dim);
    for (std::size_t n = 1; n + 1 <= N; ++n) {
        const auto c = static_cast<Eigen::Index>(n);
        displacement += 0.5 * dt * (vt.col(c) + vt.col(c - 1));
        kernels::parallel::lag_convolution(b, vt, n, 0, view(conv));
        conv += 0.25 * (b[n + 1] * h.v.col(0) - b[n] * h.v.col(1));
        const Vector f_avg = 0.25 * (loads.col(c + 1) + 2.0 * loads.col(c) + loads.col(c - 1));
        const Vector r = mul(system.mass, Vector((h.v.col(c + 1) - h.v.col(c - 1)) / (2.0 * dt))) +
                         mul(system.damping, conv) + mul(system.stiffness, displacement) - f_avg;
        out.push_back(r.norm());
    }
    return out;
}

DiscreteEnergy discrete_energy(const StateHistory& h, const SemidiscreteSystem& system) {
    const std::size_t S = h.steps();
    DiscreteEnergy e;
    Vector sum = Vector::Zero(h.dim());
    for (std::size_t n = 0; n < S; ++n) {
        const auto c = static_cast<Eigen::Index>(n);
        const Vector vhat = 0.5 * (h.v.col(c + 1) + h.v.col(c));
        const double kin = vhat.dot(mul(system.mass, vhat));
        e.kinetic_max = std::max(e.kinetic_max, kin);
        if (n + 1 == S) e.kinetic_last = kin;
        const Vector vt = n == 0 ? Vector(vhat)
                                 : Vector(0.25 * (h.v.col(c + 1) + 2.0 * h.v.col(c) + h.v.col(c - 1)));
        sum += vt;
    }
    sum *= h.grid.dt();
    e.potential = sum.dot(mul(system.stiffness, sum));
    return e;
}

}  // namespace fracwave
