#pragma once
// Modified Bessel functions of the second kind, orders 0 and 1, for real x > 0.
// Two regimes: the ascending series up to x = 2 and a Chebyshev expansion of
// the exponentially scaled function beyond.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "detail/bessel_cheb.hpp"

namespace vortexlab {

inline constexpr double bessel_seam = 2.0;

struct BesselEval {
    double x;
    double k0;
    double k1;
};

namespace detail {

inline void check_bessel_arg(double x) {
    if (std::isnan(x) || x <= 0.0) throw std::domain_error("modified Bessel K: argument must be positive");
}

template <std::size_t N>
double clenshaw_half_first(const std::array<double, N>& c, double t) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = N; k-- > 1;) {
        const double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + 0.5 * c[0];
}

// Series branch, valid (and used) for 0 < x <= 2. Returns {K0, K1}.
inline std::array<double, 2> bessel_k_series(double x) {
    constexpr double gamma = std::numbers::egamma;
    const double q = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);

    double i0 = 0.0, i1 = 0.0, k0_sum = 0.0, k1_sum = 0.0;
    double term0 = 1.0;  // q^k / (k!)^2
    double term1 = 1.0;  // q^k / (k! (k+1)!)
    double harmonic = 0.0;  // H_k
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            term0 *= q / (double(k) * k);
            term1 *= q / (double(k) * (k + 1));
            harmonic += 1.0 / k;
        }
        const double h_next = harmonic + 1.0 / (k + 1);
        i0 += term0;
        i1 += term1;
        k0_sum += harmonic * term0;
        k1_sum += (harmonic + h_next - 2.0 * gamma) * term1;
        if (term0 < 1e-18 * i0 && k > 2) break;
    }
    i1 *= 0.5 * x;
    const double k0 = -(log_half + gamma) * i0 + k0_sum;
    const double k1 = 1.0 / x + i1 * log_half - 0.25 * x * k1_sum;
    return {k0, k1};
}

inline std::array<double, 2> bessel_k_cheb(double x) {
    const double t = 4.0 / x - 1.0;
    const double scale = std::exp(-x) / std::sqrt(x);
    return {scale * clenshaw_half_first(k0_cheb, t), scale * clenshaw_half_first(k1_cheb, t)};
}

inline std::array<double, 2> bessel_k_pair(double x) {
    check_bessel_arg(x);
    if (x < 1e-300) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    return x <= bessel_seam ? bessel_k_series(x) : bessel_k_cheb(x);
}

}  // namespace detail

inline double bessel_k0(double x) { return detail::bessel_k_pair(x)[0]; }
inline double bessel_k1(double x) { return detail::bessel_k_pair(x)[1]; }

inline BesselEval bessel_k(double x) {
    const auto kk = detail::bessel_k_pair(x);
    return {x, kk[0], kk[1]};
}

// Disagreement of the two branches at the seam, relative to the value there.
inline std::array<double, 2> bessel_seam_residual() {
    const auto s = detail::bessel_k_series(bessel_seam);
    const auto c = detail::bessel_k_cheb(bessel_seam);
    return {std::abs(s[0] - c[0]) / c[0], std::abs(s[1] - c[1]) / c[1]};
}

}  // namespace vortexlab
