#pragma once

// MAP reconstruction of the initial pressure from noisy Sigma traces.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracwave/adjoint.hpp"
#include "fracwave/prior.hpp"

namespace fracwave {

using FieldFunction = std::function<double(double, double)>;

/// Smooth compactly supported bump amplitude * (1 - (r/radius)^2)^2.
struct Inclusion {
    Point center;
    double radius = 0.15;
    double amplitude = 1.0;

    double operator()(double x, double y) const;
};

struct ReconProblem {
    const WaveModel* model = nullptr;
    ObservationTrace data;
    NoiseModel noise;
    BiLaplacianPrior prior;
    Vector u0_star;
    AdjointDiscretization adjoint = AdjointDiscretization::Consistent;

    ReconProblem(const WaveModel& m, ObservationTrace y, NoiseModel n, BiLaplacianPrior p,
                 Vector reference);
    void validate() const;
};

struct CostBreakdown {
    double total = 0.0;
    double misfit = 0.0;
    double prior = 0.0;
};

CostBreakdown cost(const ReconProblem& problem, const Vector& u0);
GradientResult gradient(const ReconProblem& problem, const Vector& u0);

enum class OptimizerKind { SteepestDescent, LBFGS };

const char* to_string(OptimizerKind k) noexcept;
OptimizerKind optimizer_from_string(const std::string& name);

/// Inner product in which search directions are formed.
enum class OptimizerMetric {
    /// (grad u, grad v), the space of the adjoint gradient
    H1,
    /// u^T A M^{-1} A v, the prior precision
    Prior,
};

const char* to_string(OptimizerMetric m) noexcept;
OptimizerMetric metric_from_string(const std::string& name);

struct OptimizerSettings {
    OptimizerKind kind = OptimizerKind::LBFGS;
    OptimizerMetric metric = OptimizerMetric::Prior;
    int max_iterations = 200;
    /// stop once |g| <= gradient_tolerance * |g_0| (H^1_0 norm)
    double gradient_tolerance = 1e-6;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 30;
    int memory = 10;
};

struct IterationRecord {
    int iteration = 0;
    double cost = 0.0;
    double misfit = 0.0;
    /// H^1_0 norm of the gradient
    double gradient_norm = 0.0;
    double step = 0.0;
};

struct MinimizeResult {
    Vector u0;
    std::vector<IterationRecord> log;
    bool converged = false;
    bool line_search_failed = false;
    std::string message;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

MinimizeResult minimize(const ReconProblem& problem, const Vector& u0_init,
                        const OptimizerSettings& settings = {},
                        const IterationCallback& on_iteration = {});

struct SyntheticData {
    ObservationTrace clean;
    ObservationTrace noisy;
    /// absolute noise standard deviation, delta * max |clean|
    double sigma = 0.0;
};

/// Solves on a mesh and time grid refined by fine_factor, reads the trace at
/// the coarse Sigma node positions every fine_factor-th step and adds
/// Gaussian noise of standard deviation delta * max|y|.
SyntheticData generate_data(const WaveModel& coarse, const FieldFunction& true_u0,
                            int fine_factor, double noise_delta, std::uint64_t seed);

}  // namespace fracwave
