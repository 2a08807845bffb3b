#include "fracwave/linsolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace fracwave {

using ColMajor = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct SpdSolver::Impl {
    ColMajor A;
    Eigen::SimplicialLLT<ColMajor> llt;
    Eigen::ConjugateGradient<ColMajor, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    double tolerance = 1e-14;
};

SpdSolver::SpdSolver(const SparseMatrix& A, Method method, double cg_tolerance)
    : method_(method), impl_(std::make_unique<Impl>()) {
    if (A.rows() != A.cols()) throw std::invalid_argument("SpdSolver needs a square matrix");
    if (method_ == Method::Auto)
        method_ = A.rows() > kCholeskyLimit ? Method::ConjugateGradient : Method::Cholesky;
    impl_->A = A;
    impl_->tolerance = cg_tolerance;
    if (method_ == Method::Cholesky) {
        impl_->llt.compute(impl_->A);
        if (impl_->llt.info() != Eigen::Success)
            throw SolveError("Cholesky factorization failed; matrix not positive definite", 0.0);
    } else {
        impl_->cg.setTolerance(cg_tolerance);
        impl_->cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * A.rows()));
        impl_->cg.compute(impl_->A);
    }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Eigen::Index SpdSolver::size() const noexcept { return impl_->A.rows(); }

Vector SpdSolver::solve(const Vector& b) const {
    if (b.size() != impl_->A.rows()) throw std::invalid_argument("SpdSolver::solve: size mismatch");
    Vector x;
    if (method_ == Method::Cholesky) {
        x = impl_->llt.solve(b);
        if (impl_->llt.info() != Eigen::Success) throw SolveError("Cholesky back-substitution failed", 0.0);
    } else {
        x = impl_->cg.solve(b);
        if (impl_->cg.info() != Eigen::Success) {
            const double bn = b.norm();
            const double r = (impl_->A * x - b).norm() / (bn > 0.0 ? bn : 1.0);
            throw SolveError("conjugate gradients did not converge", r);
        }
    }
    if (!x.allFinite()) throw SolveError("linear solve produced non-finite values", INFINITY);
    return x;
}

}  // namespace fracwave
