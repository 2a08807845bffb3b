#include "fracwave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fracwave/adjoint.hpp"
#include "fracwave/fem.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/rng.hpp"
#include "fracwave/timestepper.hpp"

namespace fracwave::harness {

namespace {

double max_sq_norm(const std::vector<Vector>& w) {
    double s = 0.0;
    for (const auto& v : w) s = std::max(s, v.squaredNorm());
    return s;
}

std::vector<Vector> random_sequence(NormalRng& rng, std::size_t len, Eigen::Index dim) {
    std::vector<Vector> w(len, Vector(dim));
    for (auto& v : w)
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    return w;
}

std::size_t draw_index(NormalRng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

SparseMatrix scalar(double v) {
    SparseMatrix A(1, 1);
    if (v != 0.0) A.insert(0, 0) = v;
    A.makeCompressed();
    return A;
}

double sin_mode(double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); }

}  // namespace

LemmaGap telescoping_check(const std::vector<Vector>& w) {
    if (w.size() < 3) throw std::invalid_argument("telescoping check needs w_0..w_{N+1} with N >= 1");
    const std::size_t N = w.size() - 2;
    LemmaGap g;
    for (std::size_t n = 1; n <= N; ++n)
        g.lhs += (w[n + 1] - w[n - 1]).dot(0.25 * (w[n + 1] + 2.0 * w[n] + w[n - 1]));
    g.rhs = (0.5 * (w[N + 1] + w[N])).squaredNorm() - (0.5 * (w[1] + w[0])).squaredNorm();
    g.gap = std::abs(g.lhs - g.rhs);
    g.scale = max_sq_norm(w);
    return g;
}

LemmaGap partial_sum_check(const std::vector<Vector>& w) {
    if (w.empty()) throw std::invalid_argument("partial-sum check needs at least one vector");
    LemmaGap g;
    Vector inner = Vector::Zero(w[0].size());
    Vector total = w[0];
    for (std::size_t n = 1; n < w.size(); ++n) {
        inner += 0.5 * (w[n] + w[n - 1]);
        g.lhs += inner.dot(w[n]);
        total += w[n];
    }
    g.rhs = 0.25 * (total.squaredNorm() - w[0].squaredNorm());
    g.gap = g.lhs - g.rhs;
    const double len = static_cast<double>(w.size());
    g.scale = len * len * max_sq_norm(w);
    return g;
}

double gram_min_eigenvalue(Alpha alpha, double dt, std::size_t J) {
    const Matrix A = quadrature_gram(alpha, dt, J);
    const Matrix sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

std::vector<CheckResult> lemma_suite(int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("lemma suite needs at least one trial");
    constexpr double tol = 1e-12;
    NormalRng rng(seed);
    double worst1 = 0.0, worst2 = 0.0;
    bool first2 = true;
    for (int t = 0; t < trials; ++t) {
        const std::size_t N = draw_index(rng, 1, 50);
        const auto dim = static_cast<Eigen::Index>(draw_index(rng, 1, 8));
        const auto g1 = telescoping_check(random_sequence(rng, N + 2, dim));
        worst1 = std::max(worst1, g1.gap / g1.scale);
        const auto g2 = partial_sum_check(random_sequence(rng, N + 1, dim));
        const double rel = g2.gap / g2.scale;
        worst2 = first2 ? rel : std::min(worst2, rel);
        first2 = false;
    }
    std::vector<CheckResult> out;
    out.push_back({"telescoping random max relative gap", worst1, tol, worst1 <= tol});
    out.push_back({"partial-sum random min relative slack", worst2, -tol, worst2 >= -tol});

    std::vector<Vector> alt;
    for (int n = 0; n < 5; ++n) alt.push_back(Vector::Constant(3, n % 2 == 0 ? 1.0 : -1.0));
    const auto ga = telescoping_check(alt);
    out.push_back({"telescoping alternating sequence gap", ga.gap / ga.scale, tol, ga.gap <= tol * ga.scale});
    const auto gc = partial_sum_check(std::vector<Vector>(6, Vector::Constant(2, 0.7)));
    out.push_back({"partial-sum constant sequence slack", gc.gap / gc.scale, -tol, gc.gap >= -tol * gc.scale});
    return out;
}

std::vector<CheckResult> coercivity_suite() {
    constexpr double tol = -1e-12;
    std::vector<CheckResult> out;
    for (std::size_t J : {8u, 32u, 64u})
        for (double a : {0.1, 0.5, 0.9}) {
            const double ev = gram_min_eigenvalue(Alpha(a), 1.0, J);
            out.push_back({"gram J=" + std::to_string(J) + " alpha=" + std::to_string(a).substr(0, 3) +
                               " min eigenvalue",
                           ev, tol, ev >= tol});
        }
    return out;
}

CheckResult three_stage_check(int nx, std::size_t steps) {
    const StructuredMesh mesh(Box{0.0, 0.0, 1.0, 1.0}, nx, nx);
    const auto coef = oracle::unit_square_mode_coefficients();
    const SparseMatrix K = assemble_stiffness(mesh);
    SemidiscreteSystem sys;
    sys.mass = apply_dirichlet(assemble_mass(mesh), mesh.boundary_nodes());
    SparseMatrix Kc = coef.c2 * K, Cb = coef.b * K;
    sys.stiffness = apply_dirichlet(Kc, mesh.boundary_nodes());
    sys.damping = apply_dirichlet(Cb, mesh.boundary_nodes());
    Vector shape = interpolate(mesh, [](double x, double y) { return x * (1.0 - x) * y * y * (1.0 - y); });
    const Vector load = sys.mass * shape;
    sys.forcing = Forcing::function([load](double t) { return Vector(std::cos(3.0 * t) * load); });
    const Vector u0 = interpolate(mesh, [](double x, double y) {
        return sin_mode(x, y) + 0.3 * std::sin(2.0 * std::numbers::pi * x) * std::sin(std::numbers::pi * y);
    });
    const Vector v0 = Vector::Zero(u0.size());
    const TimeGrid grid(0.08, steps);
    const ConvolutionWeights weights(Scheme::Galerkin, Alpha(0.5), grid.dt(), steps);
    const NewmarkParams params{};
    const StateHistory h = run_forward(sys, params, weights, grid, u0, v0);
    const Matrix loads = sys.forcing.discretize(grid, sys.dim(), ForcingRule::Pointwise);
    const auto res = three_stage_residual(h, sys, weights, params, loads);
    double scale = 0.0;
    for (Eigen::Index n = 0; n < h.d.cols(); ++n)
        scale = std::max({scale, (sys.stiffness * h.d.col(n)).norm(), (sys.mass * h.a.col(n)).norm(),
                          loads.col(n).norm()});
    const double worst = *std::max_element(res.begin(), res.end()) / scale;
    constexpr double tol = 1e-10;
    return {"three-stage identity max relative residual", worst, tol, worst <= tol};
}

const char* to_string(Family f) noexcept {
    switch (f) {
        case Family::ScalarRelaxation: return "scalar-relaxation";
        case Family::ClassicalWave: return "classical-wave";
        case Family::SingleMode2D: return "single-mode-2d";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    if (name == "scalar-relaxation") return Family::ScalarRelaxation;
    if (name == "classical-wave") return Family::ClassicalWave;
    if (name == "single-mode-2d") return Family::SingleMode2D;
    throw std::invalid_argument("unknown convergence family '" + name +
                                "' (expected scalar-relaxation, classical-wave or single-mode-2d)");
}

double ConvergenceReport::energy_order() const noexcept { return std::min(order_kinetic, order_potential); }

double fit_order(const std::vector<double>& dts, const std::vector<double>& errors) {
    if (dts.size() != errors.size() || dts.size() < 2) throw std::invalid_argument("fit_order needs >= 2 pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!(dts[i] > 0.0) || !(errors[i] > 0.0)) throw std::invalid_argument("fit_order needs positive data");
        const double x = std::log(dts[i]), y = std::log(errors[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct Exact {
    double w, dw;
};

Exact exact_for(Family f, double t) {
    if (f == Family::ClassicalWave) return {std::cos(t), -std::sin(t)};
    return {oracle::exact_w_half(t), t > 0.0 ? oracle::exact_dw_half(t) : 0.0};
}

ConvergenceLevel run_level(Family family, double dt, Scheme scheme, double horizon, int cells) {
    const auto N = static_cast<std::size_t>(std::llround(horizon / dt));
    if (N < 1) throw std::invalid_argument("time step larger than the horizon");
    const TimeGrid grid(dt, N + 1);
    SemidiscreteSystem sys;
    Vector shape;
    if (family == Family::SingleMode2D) {
        const StructuredMesh mesh(Box{0.0, 0.0, 1.0, 1.0}, cells, cells);
        const auto coef = oracle::unit_square_mode_coefficients();
        const SparseMatrix K = assemble_stiffness(mesh);
        SparseMatrix Kc = coef.c2 * K, Cb = coef.b * K;
        sys.mass = apply_dirichlet(assemble_mass(mesh), mesh.boundary_nodes());
        sys.stiffness = apply_dirichlet(Kc, mesh.boundary_nodes());
        sys.damping = apply_dirichlet(Cb, mesh.boundary_nodes());
        shape = interpolate(mesh, sin_mode);
    } else {
        const auto p = oracle::RelaxationParams::closed_form();
        sys.mass = scalar(1.0);
        sys.stiffness = scalar(p.B);
        sys.damping = scalar(family == Family::ClassicalWave ? 0.0 : p.A);
        shape = Vector::Ones(1);
    }
    const StateHistory h = run_forward(sys, NewmarkParams{}, scheme, Alpha(0.5), grid, shape,
                                       Vector::Zero(shape.size()));
    std::vector<Exact> ex(grid.n_nodes());
    for (std::size_t n = 0; n < ex.size(); ++n) ex[n] = exact_for(family, grid.t(n));
    auto e = [&](std::size_t n) { return Vector(h.d.col(static_cast<Eigen::Index>(n)) - ex[n].w * shape); };
    auto de = [&](std::size_t n) { return Vector(h.v.col(static_cast<Eigen::Index>(n)) - ex[n].dw * shape); };
    ConvergenceLevel lvl;
    lvl.dt = dt;
    for (std::size_t n = 0; n <= N; ++n) {
        const Vector avg = 0.5 * (de(n + 1) + de(n));
        lvl.kinetic = std::max(lvl.kinetic, std::sqrt(avg.dot(sys.mass * avg)));
    }
    const Vector end = 0.5 * (e(N) + e(N + 1));
    lvl.potential = std::sqrt(end.dot(sys.stiffness * end));
    for (std::size_t n = 0; n <= N + 1; ++n) lvl.max_displacement = std::max(lvl.max_displacement, e(n).cwiseAbs().maxCoeff());
    return lvl;
}

}  // namespace

ConvergenceReport convergence_study(Family family, const std::vector<double>& dts, Scheme scheme, double horizon,
                                    int base_cells) {
    if (dts.size() < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
    ConvergenceReport rep;
    rep.family = family;
    rep.scheme = scheme;
    rep.levels.resize(dts.size());
    std::vector<std::string> errors(dts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(dts.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            const int cells = std::max(1, static_cast<int>(std::lround(base_cells * dts[0] / dts[k])));
            rep.levels[k] = run_level(family, dts[k], scheme, horizon, cells);
        } catch (const std::exception& ex) {
            errors[k] = ex.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("convergence level failed: " + e);
    std::vector<double> kin, pot, mx;
    for (const auto& l : rep.levels) kin.push_back(l.kinetic), pot.push_back(l.potential), mx.push_back(l.max_displacement);
    rep.order_kinetic = fit_order(dts, kin);
    rep.order_potential = fit_order(dts, pot);
    rep.order_max = fit_order(dts, mx);
    return rep;
}

std::vector<IdentityLevel> adjoint_identity_study(int cells, std::size_t steps, double horizon, int levels,
                                                  double alpha) {
    if (cells < 1 || steps < 1 || levels < 1 || !(horizon > 0.0))
        throw std::invalid_argument("identity study needs positive cells, steps, levels and horizon");
    std::vector<IdentityLevel> out(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        const int nx = cells << l;
        const std::size_t n_steps = steps << l;
        const StructuredMesh mesh(Box{-1.0, -1.0, 1.0, 1.0}, nx, nx);
        const WaveModel model(mesh, SurfaceSampler::circle(mesh, {0.0, 0.0}, 0.8),
                              TimeGrid(horizon / static_cast<double>(n_steps), n_steps),
                              WavePhysics{Alpha(alpha), 1.0, 0.1});
        const Vector d = interpolate(mesh, [](double x, double y) { return std::exp(-10.0 * (x * x + y * y)); });
        Matrix w(static_cast<Eigen::Index>(model.sampler().size()), static_cast<Eigen::Index>(model.grid().n_nodes()));
        for (Eigen::Index n = 0; n < w.cols(); ++n)
            for (Eigen::Index k = 0; k < w.rows(); ++k) {
                const Point p = model.sampler().points()[static_cast<std::size_t>(k)];
                w(k, n) = std::sin(3.0 * model.grid().t(static_cast<std::size_t>(n))) * (1.0 + 0.5 * p.x);
            }
        const IdentityGap g = adjoint_identity_check(model, d, ObservationTrace(w, model.grid()));
        out[static_cast<std::size_t>(l)] = {nx, model.grid().dt(), g.lhs, g.rhs, g.gap};
    }
    return out;
}

std::vector<double> identity_orders(const std::vector<IdentityLevel>& levels) {
    std::vector<double> orders;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        orders.push_back(std::log2(levels[i].gap / levels[i + 1].gap));
    return orders;
}

}  // namespace fracwave::harness
