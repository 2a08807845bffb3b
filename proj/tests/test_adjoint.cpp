#include "doctest.h"

#include <cmath>
#include <random>

#include "fracwave/adjoint.hpp"
#include "fracwave/harness.hpp"
#include "support/oracles.hpp"

using namespace fracwave;

namespace {

struct Setup {
    WaveModel model;
    Setup(int cells, std::size_t steps, double horizon, Scheme scheme = Scheme::Galerkin, double b = 0.1)
        : model(StructuredMesh(Box{}, cells, cells),
                SurfaceSampler::circle(StructuredMesh(Box{}, cells, cells), {0.0, 0.0}, 0.5),
                TimeGrid::over(horizon, steps), WavePhysics{Alpha(0.5), 1.0, b}, scheme) {}
};

Vector random_field(const WaveModel& model, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Vector u(static_cast<Eigen::Index>(model.dofs()));
    for (auto& x : u) x = nd(gen);
    return model.restrict_interior(u);
}

ObservationTrace random_trace(const WaveModel& model, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Matrix w(static_cast<Eigen::Index>(model.sampler().size()), static_cast<Eigen::Index>(model.grid().n_nodes()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(gen);
    return {w, model.grid()};
}

BiLaplacianPrior make_prior(const WaveModel& m, double gamma = 1.0, double rho = 0.1) {
    return {m.mass(), m.laplacian(), gamma, rho};
}

double cost_at(const WaveModel& m, const Vector& u, const ObservationTrace& y, const BiLaplacianPrior& p,
               double sigma, const Vector& ustar) {
    const Vector d = m.restrict_interior(u - ustar);
    return misfit_value(m, m.observe(u), y, {sigma}) + 0.5 * p.quadratic_form(d);
}

}  // namespace

TEST_CASE("trace containers") {
    const TimeGrid g(0.1, 4);
    const auto z = ObservationTrace::zeros(3, g);
    CHECK(z.values.rows() == 3);
    CHECK(z.values.cols() == 5);
    CHECK(z.sigma_nodes() == 3);
    CHECK_THROWS_AS(ObservationTrace(Matrix::Zero(3, 4), g), std::invalid_argument);
    CHECK(adjoint_discretization_from_string(to_string(AdjointDiscretization::Continuous)) ==
          AdjointDiscretization::Continuous);
    CHECK_THROWS_AS(adjoint_discretization_from_string("transpose"), std::invalid_argument);
}

TEST_CASE("default adjoint follows the scheme") {
    Setup g(8, 10, 0.5);
    CHECK(default_adjoint(g.model) == AdjointDiscretization::Consistent);
    Setup l(8, 10, 0.5, Scheme::L1Type);
    CHECK(default_adjoint(l.model) == AdjointDiscretization::Continuous);
    CHECK_THROWS_AS(solve_adjoint(l.model, ObservationTrace::zeros(l.model.sampler().size(), l.model.grid()),
                                  AdjointDiscretization::Consistent),
                    std::invalid_argument);
}

TEST_CASE("zero source gives zero adjoint and zero gradient") {
    Setup s(8, 10, 0.5);
    for (auto d : {AdjointDiscretization::Continuous, AdjointDiscretization::Consistent}) {
        const auto st = solve_adjoint(s.model, ObservationTrace::zeros(s.model.sampler().size(), s.model.grid()), d);
        CHECK(st.history.d.norm() == 0.0);
        CHECK(st.history.v.norm() == 0.0);
        CHECK(gradient_riesz(s.model, st).norm() == 0.0);
    }
}

TEST_CASE("adjoint is linear in the source") {
    Setup s(8, 12, 0.6);
    const auto w1 = random_trace(s.model, 1), w2 = random_trace(s.model, 2);
    const ObservationTrace mix(2.0 * w1.values - 0.5 * w2.values, s.model.grid());
    for (auto d : {AdjointDiscretization::Continuous, AdjointDiscretization::Consistent}) {
        const Vector g1 = adjoint_dual(s.model, solve_adjoint(s.model, w1, d));
        const Vector g2 = adjoint_dual(s.model, solve_adjoint(s.model, w2, d));
        const Vector gm = adjoint_dual(s.model, solve_adjoint(s.model, mix, d));
        CHECK((gm - (2.0 * g1 - 0.5 * g2)).norm() <= 1e-11 * gm.norm());
    }
}

TEST_CASE("a source at the first observation time only acts at the end of the flipped run") {
    Setup s(8, 12, 0.6);
    ObservationTrace w = ObservationTrace::zeros(s.model.sampler().size(), s.model.grid());
    w.values.col(0).setOnes();
    const auto st = solve_adjoint(s.model, w, AdjointDiscretization::Continuous);
    const Eigen::Index N = 12;
    CHECK(st.history.d.leftCols(N).norm() == 0.0);
    CHECK(st.history.d.col(N).norm() > 0.0);
}

TEST_CASE("Riesz representative without damping") {
    Setup s(8, 10, 0.5, Scheme::Galerkin, 0.0);
    const auto w = random_trace(s.model, 4);
    const auto st = solve_adjoint(s.model, w, AdjointDiscretization::Continuous);
    const Vector vT = st.history.v.col(st.history.v.cols() - 1);
    const Vector expected = Matrix(s.model.laplacian()).ldlt().solve(s.model.restrict_interior(s.model.mass() * vT));
    CHECK((gradient_riesz(s.model, st) - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("consistent adjoint is the exact transpose of the observation map") {
    Setup s(8, 20, 1.0);
    for (std::uint64_t k = 0; k < 4; ++k) {
        const Vector d = random_field(s.model, 10 + k);
        const auto w = random_trace(s.model, 20 + k);
        const double lhs = s.model.trace_inner(s.model.observe(d), w.values);
        const double rhs = d.dot(adjoint_dual(s.model, solve_adjoint(s.model, w, AdjointDiscretization::Consistent)));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("identity check: zero source, bilinearity") {
    Setup s(8, 10, 0.5);
    const Vector d = random_field(s.model, 3);
    const auto zero = adjoint_identity_check(s.model, d, ObservationTrace::zeros(s.model.sampler().size(), s.model.grid()));
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    const auto w = random_trace(s.model, 5);
    const auto g1 = adjoint_identity_check(s.model, d, w);
    const auto g2 = adjoint_identity_check(s.model, 3.0 * d, w);
    const auto g3 = adjoint_identity_check(s.model, d, ObservationTrace(-2.0 * w.values, s.model.grid()));
    CHECK(g2.gap == doctest::Approx(3.0 * g1.gap).epsilon(1e-9));
    CHECK(g3.gap == doctest::Approx(2.0 * g1.gap).epsilon(1e-9));
}

TEST_CASE("continuous adjoint identity gap closes under refinement") {
    const auto levels = harness::adjoint_identity_study(8, 10, 1.0, 3);
    REQUIRE(levels.size() == 3);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) CHECK(levels[i + 1].gap < levels[i].gap);
    for (double p : harness::identity_orders(levels)) CHECK(p >= 1.0);
}

TEST_CASE("gradient vanishes at the truth with exact data") {
    Setup s(8, 20, 1.0);
    const Vector u = random_field(s.model, 7);
    const ObservationTrace y(s.model.observe(u), s.model.grid());
    const auto prior = make_prior(s.model);
    for (auto d : {AdjointDiscretization::Continuous, AdjointDiscretization::Consistent}) {
        const auto r = compute_gradient(s.model, u, y, &prior, {0.1}, u, d);
        CHECK(r.cost <= 1e-20);
        CHECK(r.derivative.norm() <= 1e-10);
    }
}

TEST_CASE("prior-only limit") {
    Setup s(8, 10, 0.5);
    const Vector u = random_field(s.model, 8), ustar = random_field(s.model, 9);
    const auto prior = make_prior(s.model);
    const auto y = random_trace(s.model, 10);
    const auto r = compute_gradient(s.model, u, y, &prior, {1e8}, ustar, AdjointDiscretization::Consistent);
    const Vector expected = s.model.restrict_interior(prior.apply_inverse(s.model.restrict_interior(u - ustar)));
    CHECK((r.derivative - expected).norm() <= 1e-8 * expected.norm());
    CHECK_THROWS_AS(compute_gradient(s.model, u, y, &prior, {0.0}, ustar, AdjointDiscretization::Consistent),
                    std::invalid_argument);
}

TEST_CASE("derivative and Riesz gradient are related by the Laplacian") {
    Setup s(8, 10, 0.5);
    const auto prior = make_prior(s.model);
    const auto r = compute_gradient(s.model, random_field(s.model, 1), random_trace(s.model, 2), &prior, {0.5},
                                    Vector::Zero(static_cast<Eigen::Index>(s.model.dofs())),
                                    AdjointDiscretization::Consistent);
    CHECK((s.model.restrict_interior(s.model.laplacian() * r.gradient) - r.derivative).norm() <=
          1e-10 * r.derivative.norm());
}

TEST_CASE("finite-difference check of the consistent gradient") {
    Setup s(8, 20, 1.0);
    const auto prior = make_prior(s.model);
    const auto y = random_trace(s.model, 30);
    const Vector ustar = Vector::Zero(static_cast<Eigen::Index>(s.model.dofs()));
    const Vector u = random_field(s.model, 31);
    const auto r = compute_gradient(s.model, u, y, &prior, {0.3}, ustar, AdjointDiscretization::Consistent);
    for (std::uint64_t k = 0; k < 3; ++k) {
        const Vector du = random_field(s.model, 40 + k);
        const double adj = r.derivative.dot(du);
        double best = 1e300;
        for (double h : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            const double fd = (cost_at(s.model, u + h * du, y, prior, 0.3, ustar) -
                               cost_at(s.model, u - h * du, y, prior, 0.3, ustar)) /
                              (2.0 * h);
            best = std::min(best, std::abs(fd - adj) / std::abs(adj));
        }
        CHECK(best <= 1e-3);
    }
}

TEST_CASE("a small step against the gradient decreases the cost") {
    Setup s(8, 20, 1.0);
    const auto prior = make_prior(s.model);
    const auto y = random_trace(s.model, 50);
    const Vector ustar = Vector::Zero(static_cast<Eigen::Index>(s.model.dofs()));
    for (auto d : {AdjointDiscretization::Continuous, AdjointDiscretization::Consistent})
        for (std::uint64_t k = 0; k < 10; ++k) {
            const Vector u = random_field(s.model, 60 + k);
            const auto r = compute_gradient(s.model, u, y, &prior, {0.3}, ustar, d);
            const double step = 1e-3 / r.gradient.lpNorm<Eigen::Infinity>();
            CHECK(cost_at(s.model, u - step * r.gradient, y, prior, 0.3, ustar) < r.cost);
        }
}

TEST_CASE("flipped Caputo convolution matches the right-sided derivative") {
    // z(t) = (T - t)^2 cos(t), zbar(s) = z(T - s), zbar(0) = 0.
    // Right-sided: (1/Gamma(1-a)) int_t^T (s - t)^{-a} z'(s) ds evaluated at t = T - s.
    const double a = 0.4, T = 1.0;
    auto dz = [&](double t) { return -2.0 * (T - t) * std::cos(t) - (T - t) * (T - t) * std::sin(t); };
    std::vector<double> err;
    for (std::size_t N : {20u, 40u, 80u}) {
        const double dt = T / static_cast<double>(N);
        const ConvolutionWeights w(Scheme::Galerkin, Alpha(a), dt, N);
        Matrix vbar(1, static_cast<Eigen::Index>(N + 1));
        for (std::size_t n = 0; n <= N; ++n) vbar(0, static_cast<Eigen::Index>(n)) = -dz(T - dt * static_cast<double>(n));
        double e = 0.0;
        for (std::size_t n : {N / 4, N / 2, N}) {
            const double s = dt * static_cast<double>(n);
            const double t = T - s;
            const double right = oracles::abel_integral(a, s, [&](double u) { return dz(t + u); });
            e = std::max(e, std::abs(apply_frac_convolution(w, vbar, n)[0] + right));
        }
        err.push_back(e);
    }
    CHECK(err[0] < 0.05);
    CHECK(err[2] < 0.6 * err[0]);
}
