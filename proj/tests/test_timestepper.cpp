#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fracwave/fem.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/timestepper.hpp"

using namespace fracwave;

namespace {

SparseMatrix scalar(double v) {
    SparseMatrix S(1, 1);
    S.insert(0, 0) = v;
    S.makeCompressed();
    return S;
}

SemidiscreteSystem scalar_system(double m, double c, double k) {
    return {scalar(m), scalar(c), scalar(k), Forcing::zero()};
}

SemidiscreteSystem relaxation_system() {
    const auto p = oracle::RelaxationParams::closed_form();
    return scalar_system(1.0, p.A, p.B);
}

Vector one(double v) { return Vector::Constant(1, v); }

// Dirichlet-eliminated system on the unit square with nx x nx cells.
SemidiscreteSystem square_system(int nx, double c2, double b, const StructuredMesh& mesh) {
    (void)nx;
    const SparseMatrix M = assemble_mass(mesh), K = assemble_stiffness(mesh);
    const auto& bd = mesh.boundary_nodes();
    return {apply_dirichlet(M, bd), apply_dirichlet(SparseMatrix(b * K), bd),
            apply_dirichlet(SparseMatrix(c2 * K), bd), Forcing::zero()};
}

Matrix random_loads(const StructuredMesh& mesh, std::size_t steps, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Matrix f(static_cast<Eigen::Index>(mesh.node_count()), static_cast<Eigen::Index>(steps + 1));
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = nd(gen);
    for (int bnode : mesh.boundary_nodes()) f.row(bnode).setZero();
    return f;
}

double scalar_error_at(double dt, double T, Formulation form) {
    const auto steps = static_cast<std::size_t>(std::lround(T / dt));
    RunOptions opt;
    opt.formulation = form;
    const auto h = run_forward(relaxation_system(), {}, Scheme::Galerkin, Alpha(0.5), TimeGrid(dt, steps),
                               one(1.0), one(0.0), opt);
    return std::abs(h.d(0, static_cast<Eigen::Index>(steps)) - oracle::exact_w_half(T));
}

}  // namespace

TEST_CASE("Newmark parameters") {
    CHECK_NOTHROW(NewmarkParams{}.validate());
    CHECK(NewmarkParams{}.is_average_acceleration());
    CHECK_THROWS_AS((NewmarkParams{0.6, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NewmarkParams{0.25, 1.1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NewmarkParams{-0.1, 0.5}.validate()), std::invalid_argument);
    CHECK(formulation_from_string(to_string(Formulation::EffectiveStiffness)) == Formulation::EffectiveStiffness);
    CHECK(forcing_rule_from_string(to_string(ForcingRule::CellAveraged)) == ForcingRule::CellAveraged);
    CHECK_THROWS_AS(formulation_from_string("explicit"), std::invalid_argument);
    CHECK_THROWS_AS(forcing_rule_from_string("midpoint"), std::invalid_argument);
}

TEST_CASE("system validation") {
    SemidiscreteSystem s{scalar(1.0), scalar(1.0), SparseMatrix(2, 2), Forcing::zero()};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    const auto good = scalar_system(1.0, 0.0, 1.0);
    CHECK_THROWS_AS(run_forward(good, {}, Scheme::Galerkin, Alpha(0.5), TimeGrid(0.1, 3), Vector::Zero(2),
                                Vector::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("initial acceleration") {
    const auto s = scalar_system(1.0, 1.0, 1.0);
    CHECK(initial_acceleration(s, one(0.0), one(0.0), one(0.0))[0] == 0.0);
    CHECK(initial_acceleration(s, one(1.0), one(0.0), one(0.0))[0] == doctest::Approx(-1.0));
    CHECK(initial_acceleration(s, one(1.0), one(7.0), one(0.0))[0] == doctest::Approx(-1.0));
    CHECK(initial_acceleration(scalar_system(2.0, 1.0, 3.0), one(1.0), one(0.0), one(5.0))[0] ==
          doctest::Approx(1.0));
}

TEST_CASE("initial acceleration of the first eigenmode tends to -2 psi") {
    // c2 = 1/pi^2 turns the eigenvalue 2 pi^2 into 2. On the alternating
    // diagonal mesh M^{-1} K psi converges only weakly, so the error is
    // measured in the discrete H^{-1} norm |M e|_{K^{-1}}.
    std::vector<double> err;
    for (int nx : {8, 16, 32}) {
        const StructuredMesh mesh(Box{0.0, 0.0, 1.0, 1.0}, nx, nx);
        const auto sys = square_system(nx, 1.0 / (std::numbers::pi * std::numbers::pi), 0.0, mesh);
        Vector psi = interpolate(mesh, [](double x, double y) {
            return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
        });
        for (int b : mesh.boundary_nodes()) psi[b] = 0.0;
        const Vector zero = Vector::Zero(psi.size());
        const Vector Me = sys.mass * Vector(initial_acceleration(sys, psi, zero, zero) + 2.0 * psi);
        const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> K{Eigen::SparseMatrix<double>(sys.stiffness)};
        err.push_back(std::sqrt(Me.dot(K.solve(Me))));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) >= 0.9);
    CHECK(err.back() < 0.02);
}

TEST_CASE("zero data give a zero history in both formulations") {
    const StructuredMesh mesh(Box{}, 5, 5);
    const auto sys = square_system(5, 1.0, 0.3, mesh);
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(mesh.node_count()));
    for (auto form : {Formulation::EffectiveMass, Formulation::EffectiveStiffness}) {
        RunOptions opt;
        opt.formulation = form;
        const auto h = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.4), TimeGrid(0.1, 10), zero, zero, opt);
        CHECK(h.d.norm() == 0.0);
        CHECK(h.v.norm() == 0.0);
        CHECK(h.a.norm() == 0.0);
    }
}

TEST_CASE("undamped average-acceleration Newmark conserves energy") {
    const auto sys = scalar_system(1.0, 0.0, 1.0);
    for (auto form : {Formulation::EffectiveMass, Formulation::EffectiveStiffness}) {
        RunOptions opt;
        opt.formulation = form;
        const auto h = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.5), TimeGrid(0.3, 200), one(1.0), one(0.0), opt);
        for (Eigen::Index n = 0; n <= 200; ++n) {
            const double e = h.v(0, n) * h.v(0, n) + h.d(0, n) * h.d(0, n);
            CHECK(e == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("scalar relaxation problem matches the closed form with second order") {
    for (auto form : {Formulation::EffectiveMass, Formulation::EffectiveStiffness}) {
        std::vector<double> err;
        for (double dt : {0.08, 0.04, 0.02, 0.01}) err.push_back(scalar_error_at(dt, 4.0, form));
        CHECK(err.back() < 1e-4);
        for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) >= 1.7);
    }
}

TEST_CASE("effective mass and effective stiffness agree on a random-forcing run") {
    const StructuredMesh mesh(Box{}, 8, 8);
    auto sys = square_system(8, 1.0, 0.5, mesh);
    sys.forcing = Forcing::sampled(random_loads(mesh, 50, 3));
    const Vector u0 = interpolate(mesh, [](double x, double y) { return (1 - x * x) * (1 - y * y); });
    const Vector v0 = Vector::Zero(u0.size());
    for (Scheme scheme : {Scheme::Galerkin, Scheme::L1Type}) {
        RunOptions a, b;
        a.formulation = Formulation::EffectiveMass;
        b.formulation = Formulation::EffectiveStiffness;
        a.solver = b.solver = SpdSolver::Method::Cholesky;
        const auto ha = run_forward(sys, {}, scheme, Alpha(0.3), TimeGrid(0.02, 50), u0, v0, a);
        const auto hb = run_forward(sys, {}, scheme, Alpha(0.3), TimeGrid(0.02, 50), u0, v0, b);
        CHECK((ha.d - hb.d).norm() <= 1e-10 * ha.d.norm());
        CHECK((ha.v - hb.v).norm() <= 1e-10 * ha.v.norm());
    }
}

TEST_CASE("effective stiffness needs beta > 0") {
    const auto sys = scalar_system(1.0, 1.0, 1.0);
    RunOptions opt;
    opt.formulation = Formulation::EffectiveStiffness;
    CHECK_THROWS_AS(run_forward(sys, {0.0, 0.5}, Scheme::Galerkin, Alpha(0.5), TimeGrid(0.1, 3), one(1.0), one(0.0), opt),
                    std::invalid_argument);
    opt.formulation = Formulation::EffectiveMass;
    CHECK_NOTHROW(run_forward(sys, {0.0, 0.5}, Scheme::Galerkin, Alpha(0.5), TimeGrid(0.1, 3), one(1.0), one(0.0), opt));
}

TEST_CASE("every step satisfies the discrete equation and the Newmark kinematics") {
    const StructuredMesh mesh(Box{}, 10, 10);
    auto sys = square_system(10, 0.8, 0.2, mesh);
    sys.forcing = Forcing::sampled(random_loads(mesh, 40, 8));
    const Vector u0 = interpolate(mesh, [](double x, double y) { return std::cos(x) * (1 - x * x) * (1 - y * y); });
    const Vector v0 = Vector::Zero(u0.size());
    const ConvolutionWeights w(Scheme::L1Type, Alpha(0.7), 0.025, 40);
    const NewmarkIntegrator integ(sys, {}, w);
    RunOptions opt;
    opt.check_residual = true;
    const auto h = run_forward(sys, {}, w, TimeGrid(0.025, 40), u0, v0, opt);
    const Matrix f = sys.forcing.discretize(h.grid, sys.dim(), ForcingRule::Pointwise);
    const double dt = 0.025;
    for (std::size_t n = 0; n < 40; ++n) {
        const auto c = static_cast<Eigen::Index>(n);
        CHECK(integ.residual(h, n + 1, f.col(c + 1)) <= 1e-10 * (1.0 + f.norm()));
        CHECK((h.d.col(c + 1) - h.d.col(c) - 0.5 * dt * (h.v.col(c) + h.v.col(c + 1))).norm() <= 1e-12 * (1.0 + h.d.norm()));
        CHECK((h.v.col(c + 1) - h.v.col(c) - 0.5 * dt * (h.a.col(c) + h.a.col(c + 1))).norm() <= 1e-12 * (1.0 + h.v.norm()));
    }
}

TEST_CASE("the scheme is linear in the data") {
    const StructuredMesh mesh(Box{}, 6, 6);
    const auto sys = square_system(6, 1.0, 0.4, mesh);
    const Vector u = interpolate(mesh, [](double x, double y) { return (1 - x * x) * (1 - y * y); });
    const Vector w = interpolate(mesh, [](double x, double y) { return x * (1 - x * x) * (1 - y * y); });
    const Vector z = Vector::Zero(u.size());
    const TimeGrid grid(0.05, 30);
    const auto hu = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.5), grid, u, z);
    const auto hw = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.5), grid, w, z);
    const auto hc = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.5), grid, 2.0 * u - 3.0 * w, z);
    CHECK((hc.d - (2.0 * hu.d - 3.0 * hw.d)).norm() <= 1e-11 * hc.d.norm());
}

TEST_CASE("forcing rules") {
    const TimeGrid grid(0.1, 20);
    const Forcing f = Forcing::function([](double t) { return Vector::Constant(2, std::cos(t)); });
    const Matrix pw = f.discretize(grid, 2, ForcingRule::Pointwise);
    const Matrix ca = f.discretize(grid, 2, ForcingRule::CellAveraged);
    for (std::size_t n = 0; n <= 20; ++n) CHECK(pw(1, static_cast<Eigen::Index>(n)) == std::cos(grid.t(n)));
    CHECK(ca(0, 0) == 1.0);
    for (std::size_t n = 0; n < 20; ++n) {
        const double avg = (std::sin(grid.t(n + 1)) - std::sin(grid.t(n))) / 0.1;
        CHECK(0.5 * (ca(0, static_cast<Eigen::Index>(n)) + ca(0, static_cast<Eigen::Index>(n + 1))) ==
              doctest::Approx(avg).epsilon(1e-13));
    }
    CHECK(Forcing::zero().discretize(grid, 3, ForcingRule::Pointwise).norm() == 0.0);
    CHECK_THROWS_AS(Forcing::sampled(Matrix::Zero(2, 5)).discretize(grid, 2, ForcingRule::Pointwise),
                    std::invalid_argument);
    CHECK_THROWS_AS(f.discretize(grid, 3, ForcingRule::Pointwise), std::invalid_argument);
}

TEST_CASE("three-stage form holds exactly for average-acceleration Galerkin runs") {
    const StructuredMesh mesh(Box{}, 8, 8);
    auto sys = square_system(8, 1.0, 0.6, mesh);
    const Matrix loads = random_loads(mesh, 30, 17);
    sys.forcing = Forcing::sampled(loads);
    const Vector u0 = interpolate(mesh, [](double x, double y) { return (1 - x * x) * (1 - y * y); });
    const Vector v0 = Vector::Zero(u0.size());
    const ConvolutionWeights w(Scheme::Galerkin, Alpha(0.35), 0.04, 30);
    const auto h = run_forward(sys, {}, w, TimeGrid(0.04, 30), u0, v0);
    const auto r = three_stage_residual(h, sys, w, {}, loads);
    CHECK(r.size() == 29);
    for (double x : r) CHECK(x <= 1e-10 * (1.0 + loads.norm()));

    StateHistory zero(TimeGrid(0.04, 30), sys.dim());
    zero.d.setZero();
    zero.v.setZero();
    zero.a.setZero();
    for (double x : three_stage_residual(zero, sys, w, {}, Matrix::Zero(sys.dim(), 31))) CHECK(x == 0.0);

    CHECK_THROWS_AS(three_stage_residual(h, sys, w, {0.25, 0.6}, loads), std::invalid_argument);
    const ConvolutionWeights l1(Scheme::L1Type, Alpha(0.35), 0.04, 30);
    CHECK_THROWS_AS(three_stage_residual(h, sys, l1, {}, loads), std::invalid_argument);
}

TEST_CASE("discrete energy stays bounded under time-step refinement") {
    const StructuredMesh mesh(Box{}, 12, 12);
    const auto sys = square_system(12, 1.0, 0.5, mesh);
    const Vector u0 = interpolate(mesh, [](double x, double y) { return (1 - x * x) * (1 - y * y) * std::exp(x); });
    const Vector v0 = Vector::Zero(u0.size());
    const double initial = u0.dot(sys.stiffness * u0);
    std::vector<double> totals;
    for (int k = 0; k <= 4; ++k) {
        const std::size_t steps = 10u << k;
        const auto h = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.5), TimeGrid(1.0 / steps, steps), u0, v0);
        const auto e = discrete_energy(h, sys);
        CHECK(std::isfinite(e.total()));
        CHECK(e.kinetic_max <= 4.0 * initial);
        totals.push_back(e.total());
    }
    for (double t : totals) CHECK(t <= 4.0 * initial);
    CHECK(totals.back() == doctest::Approx(totals[3]).epsilon(0.05));
}
