#include "fracwave/oracle.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fracwave::oracle {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kOmega = 2.0 * std::sqrt(2.0 / 3.0);
const double kKernelScale = 8.0 / (std::pow(3.0, 0.75) * std::numbers::pi);

// e^{-t/sqrt3}/3 times g, g', g'' with g = cos(wt) + sin(wt)/sqrt2.
struct Oscillation {
    double g, dg, ddg, envelope;
};

Oscillation oscillation(double t) {
    const double c = std::cos(kOmega * t), s = std::sin(kOmega * t);
    const double g = c + s / std::numbers::sqrt2;
    const double dg = kOmega * (-s + c / std::numbers::sqrt2);
    return {g, dg, -kOmega * kOmega * g, std::exp(-t / kSqrt3) / 3.0};
}

// int_0^inf e^{-r t} (-r)^p H(r) dr after r = s^2.
double spectral_moment(double t, int p) {
    auto kernel = [t, p](double s) {
        const double s2 = s * s;
        const double q = (s2 * s2 + 1.0) * (s2 * s2 + 1.0) + 16.0 * s2 / (3.0 * kSqrt3);
        double v = kKernelScale / q * std::exp(-s2 * t);
        for (int i = 0; i < p; ++i) v *= -s2;
        return v;
    };
    // |kernel| <= scale s^{2p-8} e^{-S^2 t} beyond S.
    double cutoff = 0.0;
    for (double S : {60.0, 100.0, 200.0, 400.0, 1000.0, 3000.0, 10000.0, 30000.0}) {
        const double tail = std::exp(-S * S * t) * kKernelScale * std::pow(S, 2 * p - 7) / (7 - 2 * p);
        if (tail < 1e-14) {
            cutoff = S;
            break;
        }
    }
    if (cutoff == 0.0) throw std::domain_error("spectral integral tail not controllable at this t");
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const std::array<double, 5> breaks{0.0, 1.0, 3.0, 10.0, cutoff};
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        // |kernel| on [a, b] is below scale max(a, b)^{2p} e^{-a^2 t} / (1 + a^4)^2
        const double bound = kKernelScale * std::pow(p > 0 ? b : 1.0, 2 * p) * std::exp(-a * a * t) /
                             ((1.0 + a * a * a * a) * (1.0 + a * a * a * a));
        if (bound * (b - a) < 1e-18) continue;
        sum += GK::integrate(kernel, a, b, 15, 1e-14);
    }
    return sum;
}

}  // namespace

RelaxationParams RelaxationParams::closed_form() { return {0.5, 4.0 / std::pow(3.0, 0.75), 1.0}; }

void RelaxationParams::require_closed_form() const {
    const auto ref = closed_form();
    if (std::abs(alpha - ref.alpha) > 1e-14 || std::abs(A - ref.A) > 1e-12 || std::abs(B - ref.B) > 1e-14)
        throw std::invalid_argument("closed form known only for alpha = 1/2, A = 4/3^{3/4}, B = 1");
}

double residue_part(double t) {
    const auto o = oscillation(t);
    return o.envelope * o.g;
}

double spectral_part(double t) {
    if (t < 0.0) throw std::domain_error("exact_w_half needs t >= 0");
    return spectral_moment(t, 0);
}

double exact_w_half(double t) {
    if (t < 0.0) throw std::domain_error("exact_w_half needs t >= 0");
    return residue_part(t) + spectral_moment(t, 0);
}

double exact_dw_half(double t) {
    if (!(t > 0.0)) throw std::domain_error("exact_dw_half needs t > 0");
    const auto o = oscillation(t);
    const double k = 1.0 / kSqrt3;
    return o.envelope * (o.dg - k * o.g) + spectral_moment(t, 1);
}

double exact_ddw_half(double t) {
    if (!(t > 0.0)) throw std::domain_error("exact_ddw_half needs t > 0");
    const auto o = oscillation(t);
    const double k = 1.0 / kSqrt3;
    return o.envelope * (o.ddg - 2.0 * k * o.dg + k * k * o.g) + spectral_moment(t, 2);
}

ModeCoefficients unit_square_mode_coefficients() {
    const auto p = RelaxationParams::closed_form();
    const double lambda = 2.0 * std::numbers::pi * std::numbers::pi;
    return {p.B / lambda, p.A / lambda};
}

double exact_field(double x, double y, double t) {
    return exact_w_half(t) * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

std::complex<double> pole_plus() { return {-kSqrt3 / 3.0, 2.0 * std::sqrt(6.0) / 3.0}; }

double relaxation_residual(double t) {
    if (!(t > 0.0)) throw std::domain_error("relaxation_residual needs t > 0");
    const auto p = RelaxationParams::closed_form();
    // I^{1/2}[w'](t) = (2/sqrt(pi)) int_0^{sqrt t} w'(t - u^2) du
    auto integrand = [t](double u) { return exact_dw_half(std::max(t - u * u, 1e-300)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double abel = 2.0 / std::sqrt(std::numbers::pi) * GK::integrate(integrand, 0.0, std::sqrt(t), 15, 1e-12);
    return exact_ddw_half(t) + p.A * abel + p.B * exact_w_half(t);
}

}  // namespace fracwave::oracle
