#pragma once

#include <memory>

#include "fracwave/types.hpp"

namespace fracwave {

/// Solver for one symmetric positive definite sparse matrix, factored or
/// set up once and reused for many right-hand sides.
class SpdSolver {
public:
    enum class Method { Auto, Cholesky, ConjugateGradient };

    /// Auto switches to conjugate gradients above this many unknowns.
    static constexpr Eigen::Index kCholeskyLimit = 200000;

    explicit SpdSolver(const SparseMatrix& A, Method method = Method::Auto,
                       double cg_tolerance = 1e-14);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;

    Method method() const noexcept { return method_; }
    Eigen::Index size() const noexcept;

    /// Throws SolveError when the relative residual exceeds the tolerance.
    Vector solve(const Vector& b) const;

private:
    struct Impl;
    Method method_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fracwave
