#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference used by the tests, and an OpenMP version used by the solvers.
// Both partition work by output row and sum each row in the same order, so
// results are bitwise identical regardless of thread count.

#include <cstddef>
#include <span>

#include "fracwave/types.hpp"

namespace fracwave::kernels {

namespace serial {

/// y = A x
void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

/// out = sum_{j=first_lag}^{n} w[j] * history.col(n - j)
void lag_convolution(std::span<const double> w, const Matrix& history, std::size_t n,
                     std::size_t first_lag, std::span<double> out);

}  // namespace serial

namespace parallel {

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

void lag_convolution(std::span<const double> w, const Matrix& history, std::size_t n,
                     std::size_t first_lag, std::span<double> out);

}  // namespace parallel

/// Threads the parallel kernels will use (1 without OpenMP).
int max_threads() noexcept;

/// Applies FRACWAVE_NUM_THREADS from the environment, if set.
void configure_threads_from_env();

inline Vector spmv(const SparseMatrix& A, const Vector& x) {
    Vector y(A.rows());
    parallel::spmv(A, {x.data(), static_cast<std::size_t>(x.size())},
                   {y.data(), static_cast<std::size_t>(y.size())});
    return y;
}

}  // namespace fracwave::kernels
