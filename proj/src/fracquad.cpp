#include "fracwave/fracquad.hpp"

#include <cmath>
#include <stdexcept>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

void require_positive_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("time step must be positive, got " + std::to_string(dt));
}

// a^p - b^p for a > b > 0 without cancellation.
double pow_diff(double a, double b, double p) {
    if (b == 0.0) return std::pow(a, p);
    return std::pow(b, p) * std::expm1(p * std::log1p((a - b) / b));
}

// (l+1)^q - 2 l^q + (l-1)^q for l >= 1.
double second_difference(double l, double q) {
    if (l < 2.0) return std::pow(2.0, q) - 2.0;
    const double inv = 1.0 / l;
    return std::pow(l, q) * (std::expm1(q * std::log1p(inv)) + std::expm1(q * std::log1p(-inv)));
}

double l1_scale(Alpha alpha, double dt) {
    const double p = 1.0 - alpha.value();
    return std::pow(dt, p) / (2.0 * std::tgamma(2.0 - alpha.value()));
}

double l1_interior(double c, double p, std::size_t j) {
    if (j == 0) return c;
    return c * pow_diff(static_cast<double>(j + 1), static_cast<double>(j - 1), p);
}

double l1_tail(double c, double p, std::size_t n) {
    if (n == 0) return c;
    return c * pow_diff(static_cast<double>(n), static_cast<double>(n - 1), p);
}

}  // namespace

const char* to_string(Scheme scheme) noexcept {
    return scheme == Scheme::L1Type ? "l1" : "galerkin";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "l1" || name == "L1" || name == "l1-type") return Scheme::L1Type;
    if (name == "galerkin" || name == "Galerkin") return Scheme::Galerkin;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected l1 or galerkin)");
}

std::vector<double> l1_weights(Alpha alpha, double dt, std::size_t n) {
    require_positive_dt(dt);
    if (n < 1) throw std::invalid_argument("l1_weights needs n >= 1");
    const double c = l1_scale(alpha, dt);
    const double p = 1.0 - alpha.value();
    std::vector<double> b(n + 1);
    for (std::size_t j = 0; j < n; ++j) b[j] = l1_interior(c, p, j);
    b[n] = l1_tail(c, p, n);
    return b;
}

std::vector<double> galerkin_weights(Alpha alpha, double dt, std::size_t max_lag) {
    require_positive_dt(dt);
    const double q = 2.0 - alpha.value();
    const double c = std::pow(dt, 1.0 - alpha.value()) / std::tgamma(3.0 - alpha.value());
    std::vector<double> b(max_lag + 1);
    b[0] = c;
    for (std::size_t l = 1; l <= max_lag; ++l) b[l] = c * second_difference(static_cast<double>(l), q);
    return b;
}

ConvolutionWeights::ConvolutionWeights(Scheme scheme, Alpha alpha, double dt, std::size_t max_n)
    : scheme_(scheme), alpha_(alpha), dt_(dt), max_n_(max_n) {
    require_positive_dt(dt);
    if (scheme == Scheme::Galerkin) {
        table_ = galerkin_weights(alpha, dt, max_n);
    } else {
        const double c = l1_scale(alpha, dt);
        const double p = 1.0 - alpha.value();
        table_.resize(max_n + 1);
        for (std::size_t j = 0; j <= max_n; ++j) table_[j] = l1_interior(c, p, j);
    }
}

double ConvolutionWeights::weight(std::size_t lag, std::size_t n) const {
    if (lag > n || n > max_n_)
        throw std::out_of_range("weight index out of range (lag " + std::to_string(lag) + ", n " +
                                std::to_string(n) + ", max " + std::to_string(max_n_) + ")");
    if (scheme_ == Scheme::L1Type && lag == n && n > 0)
        return l1_tail(l1_scale(alpha_, dt_), 1.0 - alpha_.value(), n);
    return table_[lag];
}

void ConvolutionWeights::fill(std::size_t n, std::vector<double>& out) const {
    if (n > max_n_) throw std::out_of_range("weight table too short for step " + std::to_string(n));
    out.assign(table_.begin(), table_.begin() + static_cast<std::ptrdiff_t>(n + 1));
    if (scheme_ == Scheme::L1Type && n > 0) out[n] = weight(n, n);
}

Vector apply_frac_convolution(const ConvolutionWeights& weights, const Matrix& velocity_history,
                              std::size_t n) {
    if (static_cast<std::size_t>(velocity_history.cols()) < n + 1)
        throw std::invalid_argument("velocity history holds " +
                                    std::to_string(velocity_history.cols()) +
                                    " entries, need " + std::to_string(n + 1));
    std::vector<double> b;
    weights.fill(n, b);
    Vector out(velocity_history.rows());
    kernels::parallel::lag_convolution(b, velocity_history, n, 0,
                                       {out.data(), static_cast<std::size_t>(out.size())});
    return out;
}

Matrix quadrature_gram(Alpha alpha, double dt, std::size_t J) {
    if (J < 1) throw std::invalid_argument("quadrature_gram needs J >= 1");
    const auto b = galerkin_weights(alpha, dt, J - 1);
    Matrix A = Matrix::Zero(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J));
    for (std::size_t n = 0; n < J; ++n)
        for (std::size_t l = 0; l <= n; ++l)
            A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n - l)) = b[l];
    return A;
}

std::vector<double> abel_node_weights(Alpha alpha, const TimeGrid& grid) {
    const double a = alpha.value();
    const double scale = std::pow(grid.dt(), 1.0 - a) / std::tgamma(1.0 - a);
    const std::size_t N = grid.n_steps();
    std::vector<double> w(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        const double kk = static_cast<double>(k);
        const double p0 = pow_diff(kk + 1.0, kk, 1.0 - a) / (1.0 - a);
        const double p1 = pow_diff(kk + 1.0, kk, 2.0 - a) / (2.0 - a);
        w[k] += scale * ((kk + 1.0) * p0 - p1);
        w[k + 1] += scale * (p1 - kk * p0);
    }
    return w;
}

Vector tilde_I_alpha(Alpha alpha, const TimeGrid& grid, const Matrix& samples) {
    if (samples.cols() == 0) throw std::invalid_argument("tilde_I_alpha: empty sample sequence");
    if (static_cast<std::size_t>(samples.cols()) != grid.n_nodes())
        throw std::invalid_argument("tilde_I_alpha: need one sample per grid node");
    const auto w = abel_node_weights(alpha, grid);
    Vector out = Vector::Zero(samples.rows());
    for (std::size_t i = 0; i < w.size(); ++i) out += w[i] * samples.col(static_cast<Eigen::Index>(i));
    return out;
}

Vector hat_I_alpha(Alpha alpha, const TimeGrid& grid, const Matrix& samples) {
    if (samples.cols() == 0) throw std::invalid_argument("hat_I_alpha: empty sample sequence");
    if (static_cast<std::size_t>(samples.cols()) != grid.n_nodes())
        throw std::invalid_argument("hat_I_alpha: need one sample per grid node");
    const auto w = abel_node_weights(alpha, grid);
    const std::size_t N = grid.n_steps();
    Vector out = Vector::Zero(samples.rows());
    for (std::size_t i = 0; i <= N; ++i)
        out += w[N - i] * samples.col(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace fracwave
