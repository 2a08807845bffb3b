#include "fracwave/prior.hpp"

#include <stdexcept>
#include <string>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

SparseMatrix prior_operator(const SparseMatrix& mass, const SparseMatrix& stiffness, double gamma, double rho) {
    if (!(gamma > 0.0)) throw std::invalid_argument("prior gamma must be positive, got " + std::to_string(gamma));
    if (!(rho >= 0.0)) throw std::invalid_argument("prior rho must be nonnegative, got " + std::to_string(rho));
    if (mass.rows() != stiffness.rows() || mass.cols() != stiffness.cols())
        throw std::invalid_argument("prior mass and stiffness differ in size");
    SparseMatrix A = gamma * mass + rho * stiffness;
    A.makeCompressed();
    return A;
}

}  // namespace

BiLaplacianPrior::BiLaplacianPrior(const SparseMatrix& mass, const SparseMatrix& stiffness, double gamma,
                                   double rho)
    : gamma_(gamma),
      rho_(rho),
      A_(prior_operator(mass, stiffness, gamma, rho)),
      mass_(mass),
      mass_solver_(mass),
      operator_solver_(A_) {}

Vector BiLaplacianPrior::apply_inverse(const Vector& field) const {
    return kernels::spmv(A_, mass_solver_.solve(kernels::spmv(A_, field)));
}

double BiLaplacianPrior::quadratic_form(const Vector& field) const {
    const Vector Af = kernels::spmv(A_, field);
    return Af.dot(mass_solver_.solve(Af));
}

Vector BiLaplacianPrior::apply_covariance(const Vector& field) const {
    return operator_solver_.solve(kernels::spmv(mass_, operator_solver_.solve(field)));
}

}  // namespace fracwave
