#pragma once

// Riemann zeta, its derivative, the prime zeta function and the regular
// parts left after removing their singularities at s = 1. Every evaluator
// requires Re s > 1.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include "tauberlab/errors.hpp"

namespace tauberlab {

using Complex = std::complex<double>;

/// A point s = sigma + i t of the complex plane.
struct ComplexPoint {
    double sigma = 2.0;
    double t = 0.0;

    Complex value() const { return {sigma, t}; }
    operator Complex() const { return value(); }  // NOLINT(google-explicit-constructor)
};

struct EvalTolerance {
    double abs_tol = 1e-10;
    std::size_t max_terms = 1'000'000;

    void validate() const {
        if (!(abs_tol > 0.0) || abs_tol > 1e-4)
            throw Error(ErrorCode::contract, "abs_tol must lie in (0, 1e-4]");
        if (max_terms < 100) throw Error(ErrorCode::contract, "max_terms must be >= 100");
    }
};

/// A value with an estimate of its absolute error.
struct Evaluation {
    Complex value;
    double est_error = 0.0;
};

namespace detail {

inline void require_half_plane(Complex s, const char* what) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw Error(ErrorCode::domain, std::string(what) + ": non-finite argument");
    if (!(s.real() > 1.0))
        throw Error(ErrorCode::domain, std::string(what) + ": requires Re s > 1");
}

/// e^z - 1 without cancellation for small |z|.
inline Complex expm1(Complex z) {
    const double x = z.real(), y = z.imag();
    const double half_sin = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin, std::exp(x) * std::sin(y)};
}

/// log(1 + z) accurate for small |z|.
inline Complex log1p(Complex z) {
    if (std::abs(z) < 1e-4) {
        const Complex z2 = z * z;
        return z - z2 / 2.0 + z2 * z / 3.0 - z2 * z2 / 4.0 + z2 * z2 * z / 5.0;
    }
    return std::log(1.0 + z);
}

// B_2, B_4, B_6, B_8, B_10 divided by (2j)!.
inline constexpr std::array<double, 5> kBernoulliOverFactorial = {
    (1.0 / 6.0) / 2.0,
    (-1.0 / 30.0) / 24.0,
    (1.0 / 42.0) / 720.0,
    (-1.0 / 30.0) / 40320.0,
    (5.0 / 66.0) / 3628800.0,
};
inline constexpr int kCorrectionTerms = 4;

/// Pieces of the Euler-Maclaurin expansion at cut-off N.
///   zeta(s) = 1 + head + N^{1-s}/(s-1) + N^{-s}/2 + corrections
struct EulerMaclaurin {
    Complex head;          // sum_{2 <= n < N} n^{-s}
    Complex pole_tail;     // N^{1-s}/(s-1)
    Complex pole_regular;  // (N^{1-s} - 1)/(s-1)
    Complex half_term;     // N^{-s}/2
    Complex corrections;
    // s-derivatives of the same pieces.
    Complex d_head, d_pole_tail, d_half_term, d_corrections;
    double remainder_bound = 0.0;
    double derivative_bound = 0.0;
    std::size_t cutoff = 0;
};

/// Certified bound on the remainder after kCorrectionTerms Bernoulli terms:
/// |R| <= |s+2k+1|/(sigma+2k+1) |B_{2k+2}/(2k+2)! s(s+1)...(s+2k) N^{-s-2k-1}|.
inline double em_remainder_bound(Complex s, double n) {
    constexpr int k = kCorrectionTerms;
    double product = 1.0;
    for (int i = 0; i <= 2 * k; ++i) product *= std::abs(s + static_cast<double>(i));
    const double sigma = s.real();
    return std::abs(s + static_cast<double>(2 * k + 1)) / (sigma + 2 * k + 1) *
           std::abs(kBernoulliOverFactorial[k]) * product * std::pow(n, -sigma - 2 * k - 1);
}

inline EulerMaclaurin euler_maclaurin(Complex s, const EvalTolerance& tol, bool with_derivative) {
    tol.validate();
    double n = 2.0;
    double bound = em_remainder_bound(s, n);
    while (bound > 0.1 * tol.abs_tol) {
        n = std::ceil(n * 1.25);
        if (n > static_cast<double>(tol.max_terms))
            throw PrecisionError("Euler-Maclaurin term budget exhausted; achieved bound " + std::to_string(bound),
                                 bound);
        bound = em_remainder_bound(s, n);
    }
    EulerMaclaurin em;
    em.cutoff = static_cast<std::size_t>(n);
    for (std::size_t k = 2; k < em.cutoff; ++k) {
        const double log_k = std::log(static_cast<double>(k));
        const Complex term = std::exp(-s * log_k);
        em.head += term;
        if (with_derivative) em.d_head -= log_k * term;
    }
    const double log_n = std::log(n);
    const Complex w = s - 1.0;
    const Complex n_pow = std::exp(-s * log_n);  // N^{-s}
    em.pole_tail = n * n_pow / w;
    em.pole_regular = expm1(-w * log_n) / w;
    em.half_term = 0.5 * n_pow;
    if (with_derivative) {
        em.d_pole_tail = -log_n * em.pole_tail - em.pole_tail / w;
        em.d_half_term = -log_n * em.half_term;
    }
    // T_j = B_2j/(2j)! s(s+1)...(s+2j-2) N^{-s-2j+1}
    Complex rising = s;             // s(s+1)...(s+2j-2)
    Complex rising_log_deriv = 1.0 / s;
    Complex power = n_pow / n;      // N^{-s-1}
    for (int j = 1; j <= kCorrectionTerms; ++j) {
        if (j > 1) {
            const double a = 2.0 * j - 3.0, b = 2.0 * j - 2.0;
            rising *= (s + a) * (s + b);
            rising_log_deriv += 1.0 / (s + a) + 1.0 / (s + b);
            power /= n * n;
        }
        const Complex term = kBernoulliOverFactorial[j - 1] * rising * power;
        em.corrections += term;
        if (with_derivative) em.d_corrections += term * (rising_log_deriv - log_n);
    }
    em.remainder_bound = bound;
    // Heuristic: differentiating the remainder brings down at most ln N plus
    // the logarithmic derivative of the rising factorial.
    double spread = log_n;
    for (int i = 0; i <= 2 * kCorrectionTerms + 1; ++i) spread += 1.0 / std::abs(s + static_cast<double>(i));
    em.derivative_bound = bound * spread;
    return em;
}

inline double rounding_error(Complex value) { return 1e-15 * std::max(1.0, std::abs(value)); }

}  // namespace detail

/// zeta(s) for Re s > 1 by Euler-Maclaurin summation.
inline Evaluation zeta(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "zeta");
    const auto em = detail::euler_maclaurin(s, tol, false);
    const Complex value = 1.0 + em.head + em.pole_tail + em.half_term + em.corrections;
    return {value, em.remainder_bound + detail::rounding_error(value)};
}

/// zeta(s) - 1, accurate in relative terms when Re s is large.
inline Evaluation zeta_minus_one(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "zeta");
    const auto em = detail::euler_maclaurin(s, tol, false);
    const Complex value = em.head + em.pole_tail + em.half_term + em.corrections;
    return {value, em.remainder_bound + 1e-16 * std::abs(value)};
}

/// zeta'(s) = -sum (ln n) n^{-s}, by differentiating the Euler-Maclaurin expansion termwise.
inline Evaluation zeta_deriv(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "zeta_deriv");
    const auto em = detail::euler_maclaurin(s, tol, true);
    const Complex value = em.d_head + em.d_pole_tail + em.d_half_term + em.d_corrections;
    return {value, em.derivative_bound + detail::rounding_error(value)};
}

/// zeta(s) - 1/(s-1), free of cancellation near s = 1.
inline Evaluation zeta_regular(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "zeta_regular");
    const auto em = detail::euler_maclaurin(s, tol, false);
    const Complex value = 1.0 + em.head + em.pole_regular + em.half_term + em.corrections;
    return {value, em.remainder_bound + detail::rounding_error(value)};
}

/// psi(s) = zeta(s)/s - 1/(s-1), the entire part left after removing the pole.
/// Algebraically psi(s) = (zeta(s) - 1/(s-1) - 1)/s, and the bracket is
/// assembled without ever forming 1/(s-1).
inline Evaluation psi_entire(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "psi_entire");
    const auto reg = zeta_regular(s, tol);
    return {(reg.value - 1.0) / s, reg.est_error / std::abs(s)};
}

/// Continuous branch of log zeta(s) on Re s > 1 (real on the real axis).
///
/// |log zeta(s)| <= log zeta(sigma), so when log zeta(sigma) < pi the
/// principal logarithm is the right branch. Otherwise the argument is
/// followed along the horizontal segment from Re s = 2 down to sigma.
inline Evaluation log_zeta(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "log_zeta");
    const double sigma = s.real();
    const auto z = zeta_minus_one(s, tol);
    const Complex principal = detail::log1p(z.value);
    const double err = z.est_error / std::max(1e-300, std::abs(1.0 + z.value));
    const double real_bound = std::log1p(zeta_minus_one(Complex(sigma, 0.0), tol).value.real());
    if (real_bound < std::numbers::pi - 0.05) return {principal, err};

    // Track arg zeta along sigma' in [sigma, 2] at fixed t.
    const double t = s.imag();
    double current = std::max(2.0, sigma);
    Complex value = zeta(Complex(current, t), tol).value;
    double arg = std::arg(value);  // |arg| < log zeta(2) < pi here
    while (current > sigma) {
        double step = std::min(current - sigma, 0.25 * (current - 1.0));
        if (current - step - sigma < 1e-3 * (sigma - 1.0)) step = current - sigma;
        for (;;) {
            const Complex next = zeta(Complex(current - step, t), tol).value;
            const double turn = std::arg(next / value);
            if (std::abs(turn) < 0.5 || step < 1e-9) {
                arg += turn;
                value = next;
                current -= step;
                break;
            }
            step *= 0.5;
        }
    }
    return {Complex(principal.real(), arg), err};
}

/// Moebius function by trial division.
inline int mobius(unsigned k) {
    if (k == 0) throw Error(ErrorCode::contract, "mobius: k must be positive");
    int sign = 1;
    for (unsigned p = 2; p * p <= k; ++p) {
        if (k % p != 0) continue;
        k /= p;
        if (k % p == 0) return 0;
        sign = -sign;
    }
    if (k > 1) sign = -sign;
    return sign;
}

namespace detail {
/// Bound on sum_{j >= k} |log zeta(j s)| / j and on sum_{j >= k} |zeta'/zeta(j s)|,
/// valid once k sigma >= 2.
inline double moebius_tail_bound(unsigned k, double sigma) {
    return 3.0 * std::pow(2.0, -static_cast<double>(k) * sigma) / (1.0 - std::pow(2.0, -sigma));
}
}  // namespace detail

/// Prime zeta P(s) = sum_p p^{-s} = sum_k mu(k)/k log zeta(k s).
inline Evaluation prime_zeta(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "prime_zeta");
    const double sigma = s.real();
    const auto first = log_zeta(s, tol);
    Complex sum = first.value;
    double err = first.est_error;
    for (unsigned k = 2;; ++k) {
        const double tail = detail::moebius_tail_bound(k, sigma);
        if (tail < 0.1 * tol.abs_tol) {
            err += tail;
            break;
        }
        const int mu = mobius(k);
        if (mu == 0) continue;
        const auto z = zeta_minus_one(static_cast<double>(k) * s, tol);
        sum += static_cast<double>(mu) / k * detail::log1p(z.value);
        err += z.est_error / k;
    }
    return {sum, err};
}

/// P'(s) = sum_k mu(k) zeta'(k s)/zeta(k s).
inline Evaluation prime_zeta_deriv(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "prime_zeta_deriv");
    const double sigma = s.real();
    Complex sum = 0.0;
    double err = 0.0;
    for (unsigned k = 1;; ++k) {
        if (k >= 2) {
            const double tail = detail::moebius_tail_bound(k, sigma);
            if (tail < 0.1 * tol.abs_tol) {
                err += tail;
                break;
            }
        }
        const int mu = mobius(k);
        if (mu == 0) continue;
        const Complex ks = static_cast<double>(k) * s;
        const auto z = zeta(ks, tol);
        const auto dz = zeta_deriv(ks, tol);
        const Complex ratio = dz.value / z.value;
        sum += static_cast<double>(mu) * ratio;
        err += (dz.est_error + std::abs(ratio) * z.est_error) / std::abs(z.value);
    }
    return {sum, err};
}

/// psi_P(s) = P(s)/s + log(s - 1), analytic near Re s >= 1.
inline Evaluation psi_prime_part(Complex s, const EvalTolerance& tol = {}) {
    detail::require_half_plane(s, "psi_prime_part");
    const auto p = prime_zeta(s, tol);
    return {p.value / s + std::log(s - 1.0), p.est_error / std::abs(s)};
}

}  // namespace tauberlab
