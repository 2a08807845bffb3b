#pragma once

#include "fracwave/linsolve.hpp"
#include "fracwave/types.hpp"

namespace fracwave {

/// Gaussian prior with covariance (gamma I - rho Laplace)^{-2}, realized as
/// precision A M^{-1} A with A = gamma M + rho K.
class BiLaplacianPrior {
public:
    BiLaplacianPrior(const SparseMatrix& mass, const SparseMatrix& stiffness, double gamma,
                     double rho);

    double gamma() const noexcept { return gamma_; }
    double rho() const noexcept { return rho_; }
    const SparseMatrix& operator_matrix() const noexcept { return A_; }

    /// A M^{-1} A field
    Vector apply_inverse(const Vector& field) const;
    /// field^T A M^{-1} A field
    double quadratic_form(const Vector& field) const;
    /// A^{-1} M A^{-1} field, the prior covariance
    Vector apply_covariance(const Vector& field) const;

private:
    double gamma_, rho_;
    SparseMatrix A_;
    SparseMatrix mass_;
    SpdSolver mass_solver_;
    SpdSolver operator_solver_;
};

inline Vector apply_prior_inverse(const BiLaplacianPrior& prior, const Vector& field) {
    return prior.apply_inverse(field);
}

}  // namespace fracwave
