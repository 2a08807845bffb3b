#include "fracwave/recon.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "fracwave/kernels.hpp"
#include "fracwave/rng.hpp"

namespace fracwave {

double Inclusion::operator()(double x, double y) const {
    const double r2 = ((x - center.x) * (x - center.x) + (y - center.y) * (y - center.y)) / (radius * radius);
    if (r2 >= 1.0) return 0.0;
    return amplitude * (1.0 - r2) * (1.0 - r2);
}

ReconProblem::ReconProblem(const WaveModel& m, ObservationTrace y, NoiseModel n, BiLaplacianPrior p,
                           Vector reference)
    : model(&m), data(std::move(y)), noise(n), prior(std::move(p)), u0_star(std::move(reference)),
      adjoint(default_adjoint(m)) {
    validate();
}

void ReconProblem::validate() const {
    if (!model) throw std::invalid_argument("reconstruction problem without a model");
    if (!(noise.sigma > 0.0)) throw std::invalid_argument("noise standard deviation must be positive");
    if (data.sigma_nodes() != model->sampler().size() || data.grid.n_steps() != model->grid().n_steps())
        throw std::invalid_argument("data do not match the model's Sigma and time grid");
    if (static_cast<std::size_t>(u0_star.size()) != model->dofs())
        throw std::invalid_argument("reference field does not match the mesh");
}

CostBreakdown cost(const ReconProblem& problem, const Vector& u0) {
    const WaveModel& model = *problem.model;
    CostBreakdown c;
    c.misfit = misfit_value(model, model.observe(u0), problem.data, problem.noise);
    c.prior = 0.5 * problem.prior.quadratic_form(model.restrict_interior(u0 - problem.u0_star));
    c.total = c.misfit + c.prior;
    return c;
}

GradientResult gradient(const ReconProblem& problem, const Vector& u0) {
    return compute_gradient(*problem.model, u0, problem.data, &problem.prior, problem.noise, problem.u0_star,
                            problem.adjoint);
}

const char* to_string(OptimizerKind k) noexcept {
    return k == OptimizerKind::LBFGS ? "lbfgs" : "steepest-descent";
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "lbfgs") return OptimizerKind::LBFGS;
    if (name == "steepest-descent" || name == "gradient-descent") return OptimizerKind::SteepestDescent;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected lbfgs or steepest-descent)");
}

const char* to_string(OptimizerMetric m) noexcept { return m == OptimizerMetric::H1 ? "h1" : "prior"; }

OptimizerMetric metric_from_string(const std::string& name) {
    if (name == "h1") return OptimizerMetric::H1;
    if (name == "prior") return OptimizerMetric::Prior;
    throw std::invalid_argument("unknown optimizer metric '" + name + "' (expected h1 or prior)");
}

namespace {

struct Pair {
    Vector s;       // step in parameter space
    Vector y_dual;  // change of the nodal derivative
    double rho;     // 1 / (s . y_dual)
};

// Maps a nodal derivative to its representative in the chosen metric.
Vector represent(const ReconProblem& problem, OptimizerMetric metric, const Vector& dual) {
    const WaveModel& model = *problem.model;
    if (metric == OptimizerMetric::H1) return model.riesz(dual);
    return model.restrict_interior(problem.prior.apply_covariance(model.restrict_interior(dual)));
}

// Two-loop recursion; s . y_dual pairs a primal with a dual vector, so only
// the initial inverse Hessian depends on the metric.
Vector lbfgs_direction(const ReconProblem& problem, OptimizerMetric metric, const std::deque<Pair>& memory,
                       const Vector& derivative) {
    Vector q_dual = derivative;
    std::vector<double> alpha(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
        alpha[i] = memory[i].rho * memory[i].s.dot(q_dual);
        q_dual -= alpha[i] * memory[i].y_dual;
    }
    Vector r = represent(problem, metric, q_dual);
    if (!memory.empty()) {
        const Pair& last = memory.back();
        const Vector y = represent(problem, metric, last.y_dual);
        r *= last.s.dot(last.y_dual) / y.dot(last.y_dual);
    }
    for (std::size_t i = 0; i < memory.size(); ++i) {
        const double beta = memory[i].rho * memory[i].y_dual.dot(r);
        r += (alpha[i] - beta) * memory[i].s;
    }
    return -r;
}

}  // namespace

MinimizeResult minimize(const ReconProblem& problem, const Vector& u0_init, const OptimizerSettings& settings,
                        const IterationCallback& on_iteration) {
    problem.validate();
    if (settings.max_iterations < 0 || settings.memory < 1 || !(settings.gradient_tolerance > 0.0) ||
        !(settings.armijo > 0.0 && settings.armijo < 0.5) || !(settings.backtrack > 0.0 && settings.backtrack < 1.0))
        throw std::invalid_argument("invalid optimizer settings");
    const WaveModel& model = *problem.model;
    MinimizeResult result;
    Vector x = model.restrict_interior(u0_init);
    GradientResult g = gradient(problem, x);
    const double g0 = std::sqrt(std::max(0.0, g.gradient.dot(g.derivative)));
    auto record = [&](int it, double step, double gnorm) {
        IterationRecord r{it, g.cost, g.misfit, gnorm, step};
        result.log.push_back(r);
        if (on_iteration) on_iteration(r);
    };
    record(0, 0.0, g0);
    std::deque<Pair> memory;
    double last_step = 1.0;

    if (g0 == 0.0) {
        result.converged = true;
        result.message = "zero initial gradient";
    }
    for (int it = 1; !result.converged && it <= settings.max_iterations; ++it) {
        const Vector steepest = -represent(problem, settings.metric, g.derivative);
        Vector p = settings.kind == OptimizerKind::LBFGS
                       ? lbfgs_direction(problem, settings.metric, memory, g.derivative)
                       : steepest;
        double slope = p.dot(g.derivative);
        if (!(slope < 0.0)) {
            memory.clear();
            p = steepest;
            slope = p.dot(g.derivative);
        }
        const double f0 = g.cost;
        auto phi = [&](double t) { return cost(problem, x + t * p).total; };
        auto armijo_ok = [&](double t, double ft) { return ft <= f0 + settings.armijo * t * slope; };
        // Minimizer of the quadratic through phi(0), phi'(0) and phi(t).
        auto interpolate = [&](double t, double ft) {
            const double curv = ft - f0 - slope * t;
            return curv > 0.0 ? -slope * t * t / (2.0 * curv) : 2.0 * t;
        };

        double t = settings.kind == OptimizerKind::LBFGS && !memory.empty() ? 1.0 : last_step;
        double ft = phi(t);
        bool accepted = false;
        if (armijo_ok(t, ft) && settings.kind == OptimizerKind::SteepestDescent) {
            const double ts = interpolate(t, ft);
            if (ts > t) {
                const double fs = phi(ts);
                if (fs < ft && armijo_ok(ts, fs)) t = ts, ft = fs;
            }
        }
        for (int bt = 0; bt <= settings.max_backtracks; ++bt) {
            if (armijo_ok(t, ft)) {
                accepted = true;
                break;
            }
            t = std::clamp(interpolate(t, ft), 0.1 * t, settings.backtrack * t);
            ft = phi(t);
        }
        if (!accepted) {
            result.line_search_failed = true;
            result.message = "line search failed after " + std::to_string(settings.max_backtracks) + " backtracks";
            break;
        }
        last_step = t;
        const Vector s = t * p;
        GradientResult g_new = gradient(problem, x + s);
        Pair pair{s, g_new.derivative - g.derivative, 0.0};
        const double sy = pair.s.dot(pair.y_dual);
        x += s;
        g = std::move(g_new);
        if (sy > 1e-14 * s.norm() * pair.y_dual.norm()) {
            pair.rho = 1.0 / sy;
            memory.push_back(std::move(pair));
            if (static_cast<int>(memory.size()) > settings.memory) memory.pop_front();
        }
        const double gnorm = std::sqrt(std::max(0.0, g.gradient.dot(g.derivative)));
        record(it, t, gnorm);
        if (gnorm <= settings.gradient_tolerance * g0) {
            result.converged = true;
            result.message = "relative gradient norm below tolerance";
        } else if (f0 - g.cost <= 1e-15 * std::abs(f0)) {
            result.message = "no further decrease at working precision";
            break;
        }
    }
    if (!result.converged && result.message.empty()) result.message = "iteration limit reached";
    result.u0 = x;
    return result;
}

SyntheticData generate_data(const WaveModel& coarse, const FieldFunction& true_u0, int fine_factor,
                            double noise_delta, std::uint64_t seed) {
    if (fine_factor < 2) throw std::invalid_argument("fine_factor must be at least 2");
    if (!(noise_delta >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    const auto& cm = coarse.mesh();
    const StructuredMesh fine(cm.box(), cm.nx() * fine_factor, cm.ny() * fine_factor);
    const TimeGrid grid(coarse.grid().dt() / fine_factor, coarse.grid().n_steps() * static_cast<std::size_t>(fine_factor));
    const SemidiscreteSystem system = wave_system(fine, coarse.physics());
    const ConvolutionWeights weights(coarse.scheme(), coarse.physics().alpha, grid.dt(), grid.n_steps());
    Vector u0 = interpolate(fine, true_u0);
    for (int b : fine.boundary_nodes()) u0[b] = 0.0;
    RunOptions opts;
    opts.formulation = coarse.formulation();
    const StateHistory h = run_forward(system, coarse.params(), weights, grid, u0, Vector::Zero(u0.size()), opts);

    const auto& sampler = coarse.sampler();
    std::vector<int> fine_nodes;
    for (const Point& p : sampler.points()) fine_nodes.push_back(fine.nearest_node(p));
    const auto cols = static_cast<Eigen::Index>(coarse.grid().n_nodes());
    Matrix clean(static_cast<Eigen::Index>(sampler.size()), cols);
    for (Eigen::Index n = 0; n < cols; ++n)
        for (std::size_t k = 0; k < fine_nodes.size(); ++k)
            clean(static_cast<Eigen::Index>(k), n) = h.d(fine_nodes[k], n * fine_factor);

    SyntheticData out{ObservationTrace(clean, coarse.grid()), ObservationTrace(clean, coarse.grid()), 0.0};
    out.sigma = noise_delta * clean.cwiseAbs().maxCoeff();
    NormalRng rng(seed);
    for (Eigen::Index n = 0; n < cols; ++n)
        for (Eigen::Index k = 0; k < clean.rows(); ++k) out.noisy.values(k, n) += out.sigma * rng.normal();
    return out;
}

}  // namespace fracwave
