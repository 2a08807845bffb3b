// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Tolerances and time limits are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fracwave/adjoint.hpp"
#include "fracwave/harness.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/recon.hpp"
#include "fracwave/rng.hpp"
#include "support/oracles.hpp"

using namespace fracwave;

namespace {

constexpr double kOracleTol = 1e-10;
constexpr double kMinOrder = 1.7;
constexpr double kRefinementDrop = 2.5;
constexpr double kFieldErrorBudget = 0.05;
constexpr double kExactSnapshotTol = 1e-12;
constexpr double kLemmaTol = 1e-12;
constexpr double kGramTol = -1e-12;
constexpr double kThreeStageTol = 1e-10;
constexpr double kGradientTol = 1e-3;
constexpr double kMinIdentityOrder = 1.0;
constexpr double kGradientReduction = 1e-3;
constexpr double kMisfitRatio = 1.5;
constexpr double kBruteForceTol = 1e-3;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- 1 -------------------------------------------------------------------

Outcome oracle_fidelity() {
    const double w0 = oracle::exact_w_half(0.0);
    const double r0 = oracle::residue_part(0.0);
    const double s0 = oracle::spectral_part(0.0);
    const bool ok = std::abs(w0 - 1.0) <= kOracleTol && std::abs(r0 - 1.0 / 3.0) <= kOracleTol &&
                    std::abs(s0 - 2.0 / 3.0) <= kOracleTol;
    return {ok, "|w(0)-1| = " + fmt("%.2e", std::abs(w0 - 1.0)) + ", R(0) = " + fmt("%.15f", r0) +
                    ", spectral(0) = " + fmt("%.15f", s0)};
}

// ---- 2 -------------------------------------------------------------------

Outcome scalar_convergence() {
    const auto r = harness::convergence_study(harness::Family::ScalarRelaxation, {0.08, 0.04, 0.02, 0.01});
    return {r.energy_order() >= kMinOrder, "orders kinetic " + fmt("%.3f", r.order_kinetic) + ", potential " +
                                               fmt("%.3f", r.order_potential) + ", max " + fmt("%.3f", r.order_max)};
}

// ---- 3 -------------------------------------------------------------------

std::vector<double> single_mode_errors(int cells, double dt) {
    const std::vector<double> times{0.0, 0.8, 1.6, 2.4, 3.2, 4.0};
    const StructuredMesh mesh(Box{0.0, 0.0, 1.0, 1.0}, cells, cells);
    const auto coef = oracle::unit_square_mode_coefficients();
    const SemidiscreteSystem sys = wave_system(mesh, WavePhysics{Alpha(0.5), coef.c2, coef.b});
    const auto steps = static_cast<std::size_t>(std::lround(4.0 / dt));
    auto psi_fn = [](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); };
    Vector psi = interpolate(mesh, psi_fn);
    for (int b : mesh.boundary_nodes()) psi[b] = 0.0;
    const auto h = run_forward(sys, {}, Scheme::Galerkin, Alpha(0.5), TimeGrid(dt, steps), psi, Vector::Zero(psi.size()));
    std::vector<double> err;
    for (double t : times) {
        const auto n = static_cast<Eigen::Index>(std::lround(t / dt));
        const Vector ref = oracle::exact_w_half(t) * psi;
        const Vector e = h.d.col(n) - ref;
        err.push_back(std::sqrt(e.dot(sys.mass * e) / ref.dot(sys.mass * ref)));
    }
    return err;
}

Outcome forward_2d() {
    const auto coarse = single_mode_errors(32, 0.08);
    const auto fine = single_mode_errors(64, 0.04);
    bool ok = coarse[0] <= kExactSnapshotTol && fine[0] <= kExactSnapshotTol;
    std::string detail = "errors 32x32:";
    for (double e : coarse) detail += " " + fmt("%.2e", e);
    detail += "; drops:";
    for (std::size_t k = 1; k < coarse.size(); ++k) {
        const double drop = coarse[k] / fine[k];
        ok = ok && coarse[k] <= kFieldErrorBudget && drop >= kRefinementDrop;
        detail += " " + fmt("%.2f", drop);
    }
    return {ok, detail};
}

// ---- 4, 5, 6 ----------------------------------------------------------------

Outcome lemmas() {
    NormalRng rng(2024);
    double worst1 = 0.0, worst2 = 0.0;
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
        const auto len = 3 + static_cast<std::size_t>(rng.uniform() * 50.0);
        const auto dim = 1 + static_cast<Eigen::Index>(rng.uniform() * 8.0);
        std::vector<Vector> w(std::min<std::size_t>(len, 52), Vector(std::min<Eigen::Index>(dim, 8)));
        for (auto& v : w)
            for (auto& x : v) x = rng.normal();
        const auto g1 = harness::telescoping_check(w);
        const auto g2 = harness::partial_sum_check(w);
        ok = ok && g1.gap <= kLemmaTol * g1.scale && g2.gap >= -kLemmaTol * g2.scale;
        worst1 = std::max(worst1, g1.gap / g1.scale);
        worst2 = std::min(worst2, g2.gap / g2.scale);
    }
    for (const auto& c : harness::lemma_suite(100, 0)) ok = ok && c.passed;
    return {ok, "max telescoping gap/scale " + fmt("%.2e", worst1) + ", min partial-sum slack/scale " + fmt("%.2e", worst2)};
}

Outcome coercivity() {
    double worst = 1e300;
    for (std::size_t J : {8u, 32u, 64u})
        for (double a : {0.1, 0.5, 0.9}) worst = std::min(worst, harness::gram_min_eigenvalue(Alpha(a), 1.0 / J, J));
    return {worst >= kGramTol, "min eigenvalue of the symmetric part " + fmt("%.3e", worst)};
}

Outcome three_stage() {
    const auto c = harness::three_stage_check(16, 50);
    return {c.value <= kThreeStageTol, "max relative residual " + fmt("%.2e", c.value)};
}

// ---- 7 -------------------------------------------------------------------

Outcome gradient_correctness() {
    const StructuredMesh mesh(Box{}, 8, 8);
    const WaveModel model(mesh, SurfaceSampler::circle(mesh, {0.0, 0.0}, 0.8), TimeGrid::over(1.0, 20),
                          WavePhysics{Alpha(0.5), 1.0, 0.1});
    const auto data = generate_data(model, Inclusion{{0.0, 0.55}, 0.15, 1.0}, 2, 0.01, 0);
    ReconProblem problem(model, data.noisy, NoiseModel{data.sigma},
                         BiLaplacianPrior(model.mass(), model.laplacian(), 10.0, 0.03),
                         Vector::Zero(static_cast<Eigen::Index>(model.dofs())));
    problem.adjoint = default_adjoint(model);
    NormalRng rng(1);
    auto random_field = [&] {
        Vector v(static_cast<Eigen::Index>(model.dofs()));
        for (auto& x : v) x = rng.normal();
        v = model.restrict_interior(v);
        return Vector(v / v.cwiseAbs().maxCoeff());
    };
    const Vector u = random_field();
    const GradientResult g = gradient(problem, u);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const Vector d = random_field();
        const double ad = g.derivative.dot(d);
        double best = 1e300;
        for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
            const double fd = (cost(problem, u + h * d).total - cost(problem, u - h * d).total) / (2.0 * h);
            best = std::min(best, std::abs(fd - ad) / std::abs(fd));
        }
        worst = std::max(worst, best);
    }
    const auto levels = harness::adjoint_identity_study(8, 20, 1.0, 2);
    const double order = harness::identity_orders(levels).front();
    return {worst <= kGradientTol && order >= kMinIdentityOrder,
            std::string("adjoint ") + to_string(problem.adjoint) + ", worst FD rel error " + fmt("%.2e", worst) +
                ", identity gap " + fmt("%.2e", levels[0].gap) + " -> " + fmt("%.2e", levels[1].gap) + " (order " +
                fmt("%.2f", order) + ")"};
}

// ---- 8 -------------------------------------------------------------------

Outcome reconstruction() {
    const StructuredMesh mesh(Box{}, 16, 16);
    const WaveModel model(mesh, SurfaceSampler::circle(mesh, {0.0, 0.0}, 0.8), TimeGrid::over(1.0, 50),
                          WavePhysics{Alpha(0.5), 1.0, 0.1});
    const Inclusion truth_fn{{0.0, 0.55}, 0.15, 1.0};
    const auto data = generate_data(model, truth_fn, 2, 0.01, 0);
    ReconProblem problem(model, data.noisy, NoiseModel{data.sigma},
                         BiLaplacianPrior(model.mass(), model.laplacian(), 10.0, 0.03),
                         Vector::Zero(static_cast<Eigen::Index>(model.dofs())));
    problem.adjoint = default_adjoint(model);
    const auto r = minimize(problem, Vector::Zero(static_cast<Eigen::Index>(model.dofs())));
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < r.log.size(); ++i) monotone = monotone && r.log[i + 1].cost <= r.log[i].cost;
    const double reduction = r.log.back().gradient_norm / r.log.front().gradient_norm;
    const double truth_misfit = cost(problem, model.restrict_interior(interpolate(mesh, truth_fn))).misfit;
    const double ratio = r.log.back().misfit / truth_misfit;
    return {monotone && reduction <= kGradientReduction && ratio <= kMisfitRatio,
            std::string(monotone ? "monotone" : "NOT monotone") + ", " + std::to_string(r.log.size() - 1) +
                " iterations, gradient reduction " + fmt("%.2e", reduction) + ", misfit " +
                fmt("%.3f", r.log.back().misfit) + " vs truth " + fmt("%.3f", truth_misfit)};
}

// ---- 9 -------------------------------------------------------------------

Outcome brute_force() {
    const StructuredMesh mesh(Box{}, 4, 4);
    const WaveModel model(mesh, SurfaceSampler::circle(mesh, {0.0, 0.0}, 0.5), TimeGrid::over(1.0, 5),
                          WavePhysics{Alpha(0.5), 1.0, 0.1});
    const auto data = generate_data(model, Inclusion{{0.0, 0.2}, 0.9, 1.0}, 2, 0.01, 0);
    ReconProblem problem(model, data.noisy, NoiseModel{data.sigma},
                         BiLaplacianPrior(model.mass(), model.laplacian(), 10.0, 0.03),
                         Vector::Zero(static_cast<Eigen::Index>(model.dofs())));
    problem.adjoint = default_adjoint(model);
    OptimizerSettings s;
    s.gradient_tolerance = 1e-10;
    s.max_iterations = 500;
    const auto r = minimize(problem, Vector::Zero(static_cast<Eigen::Index>(model.dofs())), s);
    const Vector ref = oracles::brute_force_map(model, problem.data, problem.noise.sigma, problem.prior, problem.u0_star);
    const double rel = (r.u0 - ref).norm() / ref.norm();
    return {rel <= kBruteForceTol, "relative difference " + fmt("%.2e", rel) + " after " +
                                       std::to_string(r.log.size() - 1) + " iterations"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "oracle fidelity", 1.0, oracle_fidelity},
        {2, "scalar convergence order", 5.0, scalar_convergence},
        {3, "2D forward vs exact field", 120.0, forward_2d},
        {4, "summation lemmas", 1.0, lemmas},
        {5, "Gram coercivity", 5.0, coercivity},
        {6, "three-stage identity", 30.0, three_stage},
        {7, "gradient correctness", 120.0, gradient_correctness},
        {8, "desk-scale reconstruction", 600.0, reconstruction},
        {9, "brute-force MAP agreement", 60.0, brute_force},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.passed && in_time;
        failures += pass ? 0 : 1;
        std::printf("criterion %d: %s  %s (%s; %.2f s of %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", over time");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
