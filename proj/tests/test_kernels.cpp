#include "doctest.h"

#include <cstdlib>
#include <random>

#include "fracwave/fem.hpp"
#include "fracwave/kernels.hpp"

using namespace fracwave;

namespace {

Vector random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Vector v(n);
    for (auto& x : v) x = nd(gen);
    return v;
}

std::span<const double> cspan(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> mspan(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST_CASE("serial and parallel spmv agree bitwise") {
    for (int nx : {4, 40, 120}) {
        const StructuredMesh mesh(Box{}, nx, nx);
        const SparseMatrix K = assemble_stiffness(mesh);
        const Vector x = random_vector(K.cols(), 11);
        Vector ys(K.rows()), yp(K.rows());
        kernels::serial::spmv(K, cspan(x), mspan(ys));
        kernels::parallel::spmv(K, cspan(x), mspan(yp));
        CHECK((ys.array() == yp.array()).all());
        CHECK((ys - Vector(K * x)).norm() <= 1e-12 * ys.norm());
    }
}

TEST_CASE("spmv rejects mismatched sizes") {
    const StructuredMesh mesh(Box{}, 3, 3);
    const SparseMatrix M = assemble_mass(mesh);
    Vector x(5), y(M.rows());
    CHECK_THROWS_AS(kernels::serial::spmv(M, cspan(x), mspan(y)), std::invalid_argument);
    CHECK_THROWS_AS(kernels::parallel::spmv(M, cspan(x), mspan(y)), std::invalid_argument);
}

TEST_CASE("serial and parallel lag convolution agree bitwise") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    for (Eigen::Index rows : {3, 1000, 20000}) {
        const std::size_t n = 40;
        Matrix h(rows, static_cast<Eigen::Index>(n + 1));
        for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = nd(gen);
        std::vector<double> w(n + 1);
        for (auto& x : w) x = nd(gen);
        for (std::size_t first : {0u, 1u}) {
            Vector a(rows), b(rows);
            kernels::serial::lag_convolution(w, h, n, first, mspan(a));
            kernels::parallel::lag_convolution(w, h, n, first, mspan(b));
            CHECK((a.array() == b.array()).all());
            Vector ref = Vector::Zero(rows);
            for (std::size_t j = first; j <= n; ++j) ref += w[j] * h.col(static_cast<Eigen::Index>(n - j));
            CHECK((a - ref).norm() <= 1e-12 * (1.0 + ref.norm()));
        }
    }
}

TEST_CASE("lag convolution validates its inputs") {
    Matrix h = Matrix::Zero(4, 3);
    std::vector<double> w(2);
    Vector out(4), bad(3);
    CHECK_THROWS_AS(kernels::serial::lag_convolution(w, h, 2, 0, mspan(out)), std::invalid_argument);
    w.resize(4);
    CHECK_THROWS_AS(kernels::serial::lag_convolution(w, h, 3, 0, mspan(out)), std::invalid_argument);
    CHECK_THROWS_AS(kernels::parallel::lag_convolution(w, h, 2, 0, mspan(bad)), std::invalid_argument);
}

TEST_CASE("parallel assembly matches the element-loop reference bitwise") {
    for (int nx : {1, 7, 150}) {
        const StructuredMesh mesh(Box{0.0, 0.0, 2.0, 1.0}, nx, nx + 3);
        const SparseMatrix Mp = assemble_mass(mesh), Ms = serial::assemble_mass(mesh.triangulation());
        const SparseMatrix Kp = assemble_stiffness(mesh), Ks = serial::assemble_stiffness(mesh.triangulation());
        CHECK(Mp.nonZeros() == Ms.nonZeros());
        CHECK(SparseMatrix(Mp - Ms).norm() == 0.0);
        CHECK(SparseMatrix(Kp - Ks).norm() == 0.0);
    }
}

TEST_CASE("thread count comes from the environment") {
    CHECK(kernels::max_threads() >= 1);
    setenv("FRACWAVE_NUM_THREADS", "2", 1);
    kernels::configure_threads_from_env();
#ifdef _OPENMP
    CHECK(kernels::max_threads() == 2);
#endif
    setenv("FRACWAVE_NUM_THREADS", "zero", 1);
    CHECK_THROWS_AS(kernels::configure_threads_from_env(), std::invalid_argument);
    unsetenv("FRACWAVE_NUM_THREADS");
}
