#include "fracwave/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracwave::kernels {

namespace {

void check_spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
    if (x.size() != static_cast<std::size_t>(A.cols()) || y.size() != static_cast<std::size_t>(A.rows()))
        throw std::invalid_argument("spmv: dimension mismatch");
}

void check_convolution(std::span<const double> w, const Matrix& history, std::size_t n,
                       std::span<double> out) {
    if (w.size() < n + 1) throw std::invalid_argument("lag_convolution: weight table too short");
    if (static_cast<std::size_t>(history.cols()) < n + 1)
        throw std::invalid_argument("lag_convolution: history too short");
    if (out.size() != static_cast<std::size_t>(history.rows()))
        throw std::invalid_argument("lag_convolution: output size mismatch");
}

inline void spmv_rows(const SparseMatrix& A, const double* x, double* y, Eigen::Index r0,
                      Eigen::Index r1) {
    const int* outer = A.outerIndexPtr();
    const int* inner = A.innerIndexPtr();
    const double* val = A.valuePtr();
    const int* nnz = A.innerNonZeroPtr();
    for (Eigen::Index r = r0; r < r1; ++r) {
        const int begin = outer[r];
        const int end = nnz ? begin + nnz[r] : outer[r + 1];
        double s = 0.0;
        for (int k = begin; k < end; ++k) s += val[k] * x[inner[k]];
        y[r] = s;
    }
}

// Columns are contiguous, so sweep lags outermost and rows innermost.
inline void convolve_rows(std::span<const double> w, const Matrix& history, std::size_t n,
                          std::size_t first_lag, double* out, Eigen::Index r0, Eigen::Index r1) {
    for (Eigen::Index r = r0; r < r1; ++r) out[r] = 0.0;
    for (std::size_t j = first_lag; j <= n; ++j) {
        const double wj = w[j];
        const double* col = history.data() + static_cast<Eigen::Index>(n - j) * history.rows();
        for (Eigen::Index r = r0; r < r1; ++r) out[r] += wj * col[r];
    }
}

constexpr Eigen::Index kRowBlock = 256;

}  // namespace

namespace serial {

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
    check_spmv(A, x, y);
    spmv_rows(A, x.data(), y.data(), 0, A.rows());
}

void lag_convolution(std::span<const double> w, const Matrix& history, std::size_t n,
                     std::size_t first_lag, std::span<double> out) {
    check_convolution(w, history, n, out);
    convolve_rows(w, history, n, first_lag, out.data(), 0, history.rows());
}

}  // namespace serial

namespace parallel {

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
    check_spmv(A, x, y);
    const Eigen::Index rows = A.rows();
    const double* xp = x.data();
    double* yp = y.data();
#pragma omp parallel for schedule(static) if (rows > 4 * kRowBlock)
    for (Eigen::Index r0 = 0; r0 < rows; r0 += kRowBlock)
        spmv_rows(A, xp, yp, r0, std::min(rows, r0 + kRowBlock));
}

void lag_convolution(std::span<const double> w, const Matrix& history, std::size_t n,
                     std::size_t first_lag, std::span<double> out) {
    check_convolution(w, history, n, out);
    const Eigen::Index rows = history.rows();
    double* op = out.data();
    const bool worth_it = static_cast<double>(rows) * static_cast<double>(n + 1) > 2.0e5;
#pragma omp parallel for schedule(static) if (worth_it)
    for (Eigen::Index r0 = 0; r0 < rows; r0 += kRowBlock)
        convolve_rows(w, history, n, first_lag, op, r0, std::min(rows, r0 + kRowBlock));
}

}  // namespace parallel

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void configure_threads_from_env() {
    const char* env = std::getenv("FRACWAVE_NUM_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1)
        throw std::invalid_argument(std::string("FRACWAVE_NUM_THREADS must be a positive integer, got '") +
                                    env + "'");
#ifdef _OPENMP
    omp_set_num_threads(static_cast<int>(n));
#endif
}

}  // namespace fracwave::kernels
