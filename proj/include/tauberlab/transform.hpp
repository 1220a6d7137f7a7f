#pragma once

// Laplace transforms G(s) = L{S(e^u)}(s) = int_0^inf S(e^u) e^{-su} du.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tauberlab/arith.hpp"
#include "tauberlab/errors.hpp"
#include "tauberlab/quadrature.hpp"
#include "tauberlab/special.hpp"

namespace tauberlab {

/// G(s) = zeta(s)/s, the transform of pi_N(e^u).
inline Evaluation transform_integers(Complex s, const EvalTolerance& tol = {}) {
    const auto z = zeta(s, tol);
    return {z.value / s, z.est_error / std::abs(s)};
}

/// G(s) = P(s)/s, the transform of pi_P(e^u).
inline Evaluation transform_primes(Complex s, const EvalTolerance& tol = {}) {
    const auto p = prime_zeta(s, tol);
    return {p.value / s, p.est_error / std::abs(s)};
}

/// Transform of u pi_P(e^u), i.e. of S(x) = pi_P(x) ln x:
/// -d/ds [P(s)/s] = (P(s) - s P'(s)) / s^2.
inline Evaluation transform_weighted_primes(Complex s, const EvalTolerance& tol = {}) {
    const auto p = prime_zeta(s, tol);
    const auto dp = prime_zeta_deriv(s, tol);
    const Complex s2 = s * s;
    return {(p.value - s * dp.value) / s2, (p.est_error + std::abs(s) * dp.est_error) / std::abs(s2)};
}

/// Exact transform of a step function: sum_j a_j x_j^{-s} / s.
///
/// When the step function is a truncation of some S with S(x) <= C x, pass
/// C as `growth_constant`; the neglected part beyond the last breakpoint X is
/// then bounded by C X^{1-sigma}/(sigma-1) and reported as est_error. A
/// `max_tail` below that bound raises a precision error naming the X needed.
inline Evaluation transform_step_sum(const StepFunction& step, Complex s,
                                     std::optional<double> growth_constant = std::nullopt,
                                     std::optional<double> max_tail = std::nullopt) {
    detail::require_half_plane(s, "transform_step_sum");
    Complex sum = 0.0;
    const auto& xs = step.breakpoints();
    const auto& as = step.jumps();
    for (std::size_t j = 0; j < xs.size(); ++j) sum += as[j] * std::exp(-s * std::log(xs[j]));
    double tail = 0.0;
    if (growth_constant) {
        const double sigma = s.real();
        const double last = xs.empty() ? 1.0 : xs.back();
        tail = *growth_constant * std::pow(last, 1.0 - sigma) / (sigma - 1.0);
        if (max_tail && tail > *max_tail) {
            const double needed = std::pow(*max_tail * (sigma - 1.0) / *growth_constant, 1.0 / (1.0 - sigma));
            throw PrecisionError("step-sum tail bound " + std::to_string(tail) +
                                     " above tolerance; breakpoints needed up to X >= " + std::to_string(needed),
                                 tail);
        }
    }
    return {sum / s, tail + 1e-15 * std::abs(sum / s)};
}

/// Tail of the transform integral past U for S(x) <= C x.
inline double quadrature_tail_bound(double growth_constant, double sigma, double u_max) {
    return growth_constant * std::exp(-(sigma - 1.0) * u_max) * (u_max + 1.0 / (sigma - 1.0));
}

/// Composite 16-point Gauss-Legendre quadrature of int_0^U S(e^u) e^{-su} du
/// over `panels` equal panels. Panels holding at most `jump_cap` jumps of S
/// are split at them, so step discontinuities do not spoil the rule. The
/// tail past U is not added; its bound is returned as est_error.
inline Evaluation transform_quadrature(const GrowthFunction& s_fn, Complex s, double u_max, int panels,
                                       std::optional<double> max_tail = std::nullopt,
                                       std::size_t jump_cap = 4096) {
    detail::require_half_plane(s, "transform_quadrature");
    if (!(u_max > 0.0) || panels < 1) throw Error(ErrorCode::contract, "transform_quadrature: need U > 0, panels >= 1");
    if (u_max > s_fn.max_u())
        throw TableExhausted(static_cast<std::uint64_t>(std::ceil(std::exp(u_max))),
                             static_cast<std::uint64_t>(s_fn.range_limit));
    const double sigma = s.real();
    const double tail = quadrature_tail_bound(s_fn.growth_constant, sigma, u_max);
    if (max_tail && tail > *max_tail) {
        double suggested = u_max;
        while (quadrature_tail_bound(s_fn.growth_constant, sigma, suggested) > *max_tail) suggested *= 1.25;
        throw PrecisionError("quadrature tail bound " + std::to_string(tail) + " above tolerance; suggested U = " +
                                 std::to_string(suggested),
                             tail);
    }
    const double width = u_max / panels;
    auto integrand = [&](double u) { return s_fn(std::exp(u)) * std::exp(-s * u); };
    Complex sum = 0.0;
    std::vector<double> cuts;
    for (int k = 0; k < panels; ++k) {
        const double a = k * width;
        const double b = k + 1 == panels ? u_max : (k + 1) * width;
        cuts.clear();
        cuts.push_back(a);
        std::vector<double> xs;
        if (s_fn.jumps && s_fn.jumps(std::exp(a), std::exp(b), jump_cap, xs)) {
            for (double x : xs) {
                const double u = std::log(x);
                if (u > a && u < b) cuts.push_back(u);
            }
        }
        cuts.push_back(b);
        const auto& rule16 = gauss_legendre(16);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double lo = cuts[c], hi = cuts[c + 1];
            if (!(hi > lo)) continue;
            // Short pieces between dense jumps get fewer nodes.
            const int order = std::clamp(static_cast<int>(std::ceil(16.0 * (hi - lo) / width)), 4, 16);
            const auto& rule = order == 16 ? rule16 : gauss_legendre(order);
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                sum += half * rule.weights[i] * integrand(mid + half * rule.nodes[i]);
        }
    }
    return {sum, tail};
}

// ---------------------------------------------------------------------------
// TransformSpec: a growth function paired with a way to evaluate its transform
// ---------------------------------------------------------------------------

enum class TransformKind {
    closed_form_integers,
    closed_form_primes,
    closed_form_weighted_primes,
    closed_form,         // other analytic expression
    step_sum,
    numeric_quadrature,  // no closed form; quadrature only
};

inline const char* to_string(TransformKind kind) {
    switch (kind) {
    case TransformKind::closed_form_integers: return "closed_form_integers";
    case TransformKind::closed_form_primes: return "closed_form_primes";
    case TransformKind::closed_form_weighted_primes: return "closed_form_weighted_primes";
    case TransformKind::closed_form: return "closed_form";
    case TransformKind::step_sum: return "step_sum";
    case TransformKind::numeric_quadrature: return "numeric_quadrature";
    }
    return "unknown";
}

struct TransformSpec {
    GrowthFunction source;
    TransformKind kind = TransformKind::numeric_quadrature;
    std::function<Evaluation(Complex)> closed_form;  // empty for numeric_quadrature
    // Offsets x where Re G(1 + eps + ix) develops a peak of width ~eps as eps -> 0
    // (poles of G on or near the line sigma = 1).
    std::vector<double> peaks = {0.0};
    double truncation_u = 18.0;
    int panels = 400;

    bool has_closed_form() const { return static_cast<bool>(closed_form); }

    Evaluation operator()(Complex s) const {
        if (closed_form) return closed_form(s);
        return transform_quadrature(source, s, std::min(truncation_u, source.max_u()), panels);
    }
};

inline TransformSpec identity_transform(double a = 1.0) {
    return {identity_growth(a), TransformKind::closed_form,
            [a](Complex s) {
                detail::require_half_plane(s, "identity transform");
                return Evaluation{a / (s - 1.0), 0.0};
            }};
}

inline TransformSpec integers_transform(const EvalTolerance& tol = {}) {
    return {integers_growth(), TransformKind::closed_form_integers,
            [tol](Complex s) { return transform_integers(s, tol); }};
}

/// S(x) = a x + sqrt(x): G(s) = a/(s-1) + 1/(s-1/2).
inline TransformSpec sqrt_perturbed_transform(double a = 1.0) {
    return {sqrt_perturbed_growth(a), TransformKind::closed_form,
            [a](Complex s) {
                detail::require_half_plane(s, "sqrt-perturbed transform");
                return Evaluation{a / (s - 1.0) + 1.0 / (s - 0.5), 0.0};
            }};
}

/// S(x) = x(1 + sin(ln x)/2): G(s) = 1/(s-1) + (1/2)/((s-1)^2 + 1).
/// The second term has poles at s = 1 +/- i.
inline TransformSpec oscillating_transform() {
    return {oscillating_growth(), TransformKind::closed_form,
            [](Complex s) {
                detail::require_half_plane(s, "oscillating transform");
                const Complex w = s - 1.0;
                return Evaluation{1.0 / w + 0.5 / (w * w + 1.0), 0.0};
            },
            {-1.0, 0.0, 1.0}};
}

inline TransformSpec step_transform(StepFunction step, std::string label = "step") {
    TransformSpec spec{step_growth(step, std::move(label)), TransformKind::step_sum,
                       [step](Complex s) { return transform_step_sum(step, s); }};
    spec.peaks.clear();  // entire in s
    return spec;
}

inline TransformSpec single_step_transform(double x0 = 2.0, double a = 1.0) {
    TransformSpec spec = step_transform(StepFunction({x0}, {a}));
    spec.source = single_step_growth(x0, a);
    return spec;
}

inline TransformSpec zero_transform() {
    TransformSpec spec{zero_growth(), TransformKind::closed_form, [](Complex s) {
                           detail::require_half_plane(s, "zero transform");
                           return Evaluation{0.0, 0.0};
                       }};
    spec.peaks.clear();
    return spec;
}

/// No elementary closed form (it involves E_1); quadrature or frequency route only.
inline TransformSpec slow_transform() {
    return {slow_growth(), TransformKind::numeric_quadrature, {}};
}

/// The table must outlive the spec.
inline TransformSpec primes_transform(const PrimeTable& table, const EvalTolerance& tol = {}) {
    return {primes_growth(table), TransformKind::closed_form_primes,
            [tol](Complex s) { return transform_primes(s, tol); }};
}

/// S(x) = pi_P(x) ln x. The table must outlive the spec.
inline TransformSpec weighted_primes_transform(const PrimeTable& table, const EvalTolerance& tol = {}) {
    return {weighted_primes_growth(table), TransformKind::closed_form_weighted_primes,
            [tol](Complex s) { return transform_weighted_primes(s, tol); }};
}

/// psi(s) = zeta(s)/s - 1/(s-1), viewed as the transform of pi_N(e^u) - e^u.
/// That difference is not monotone, so this transform only feeds the kernel route.
inline TransformSpec psi_transform(const EvalTolerance& tol = {}) {
    GrowthFunction diff{"pi_N-x", [](double x) { return std::floor(x) - x; }, 1.0,
                        std::numeric_limits<double>::infinity(), {}, std::nullopt};
    TransformSpec spec{std::move(diff), TransformKind::closed_form, [tol](Complex s) { return psi_entire(s, tol); }};
    spec.peaks.clear();
    return spec;
}

}  // namespace tauberlab
