#pragma once

// Truncations of the convolution operators W_{S,I,eps} on L^2(I), I = [-L/2, L/2],
// in the exponential basis e_n(t) = L^{-1/2} exp(2 pi i n t / L), n = -N..N.
//
// Two independent assemblies:
//   kernel route     M[m][n] = int int K(t - tau) e_n(tau) conj(e_m(t)) dtau dt,
//                    K(x) = (1/pi) Re G(1 + eps + ix);
//   frequency route  M[m][n] = (1/2pi) int g(|u|) e^{-eps|u|} ê_n(u) conj(ê_m(u)) du,
//                    ê_n(u) = L^{1/2} sinc(uL/2 - pi n).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "tauberlab/arith.hpp"
#include "tauberlab/errors.hpp"
#include "tauberlab/quadrature.hpp"
#include "tauberlab/transform.hpp"

namespace tauberlab {

struct IntervalSpec {
    double length = 8.0 * std::numbers::pi;

    void validate() const {
        if (!std::isfinite(length) || !(length > 0.0))
            throw Error(ErrorCode::contract, "interval length must be finite and > 0");
    }
    double half() const { return 0.5 * length; }
};

enum class Route { kernel_quadrature, frequency_formula };

inline const char* to_string(Route r) {
    return r == Route::kernel_quadrature ? "kernel_quadrature" : "frequency_formula";
}

/// Matrix of W (or of W - A Id) on indices -N..N, stored at 0..2N.
struct OperatorTruncation {
    IntervalSpec interval;
    double epsilon = 0.0;
    int order = 0;
    Eigen::MatrixXd entries;
    std::string source;
    Route route = Route::kernel_quadrature;
    double A = 0.0;
    double max_imag = 0.0;    // largest |Im| among assembled entries
    double asymmetry = 0.0;   // max |M[m][n] - M[n][m]| before symmetrization
    double est_error = 0.0;   // quadrature / tail estimate per entry

    int side() const { return 2 * order + 1; }
    double at(int m, int n) const { return entries(m + order, n + order); }
};

namespace detail {

inline void check_order(int order) {
    if (order < 0 || order > 256) throw Error(ErrorCode::contract, "order N must lie in [0, 256]");
}

inline void check_finite(double v, int m, int n, const char* route) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::numeric, std::string(route) + ": non-finite entry (" + std::to_string(m) + ", " +
                                            std::to_string(n) + ")");
}

inline double sinc(double y) {
    if (std::abs(y) < 1e-4) return 1.0 - y * y / 6.0;
    return std::sin(y) / y;
}

/// Auxiliary functions of the sine and cosine integrals for z >~ 40:
/// Si(z) = pi/2 - f cos z - g sin z, Ci(z) = f sin z - g cos z.
inline std::pair<double, double> si_ci_aux(double z) {
    const double inv2 = 1.0 / (z * z);
    double f = 0.0, g = 0.0, term_f = 1.0 / z, term_g = inv2;
    for (int k = 0; k < 30; ++k) {
        f += term_f;
        g += term_g;
        const double next_f = -term_f * (2 * k + 1) * (2 * k + 2) * inv2;
        const double next_g = -term_g * (2 * k + 2) * (2 * k + 3) * inv2;
        if (std::abs(next_f) >= std::abs(term_f) || std::abs(next_f) < 1e-18 * std::abs(f)) break;
        term_f = next_f;
        term_g = next_g;
    }
    return {f, g};
}

/// pi/2 - Si(z) for large z.
inline double si_complement(double z) {
    const auto [f, g] = si_ci_aux(z);
    return f * std::cos(z) + g * std::sin(z);
}

inline double ci_large(double z) {
    const auto [f, g] = si_ci_aux(z);
    return f * std::sin(z) - g * std::cos(z);
}

/// int_X^inf sinc(x - a) sinc(x - b) dx for a = pi n, b = pi m and X well past both.
inline double sinc_product_tail(double x_cut, int n, int m) {
    const double a = std::numbers::pi * n, b = std::numbers::pi * m;
    const double ya = x_cut - a;
    if (n == m) {
        const double s = std::sin(ya);
        return s * s / ya + si_complement(2.0 * ya);
    }
    const double yb = x_cut - b;
    const double sign = (n + m) % 2 == 0 ? 1.0 : -1.0;
    const double log_part = 0.5 * std::log1p((a - b) / ya);
    const double ci_part = 0.5 * (ci_large(2.0 * ya) - ci_large(2.0 * yb));
    return sign / (a - b) * (log_part + ci_part);
}

/// Quadrature nodes on u in [0, U] with weights already multiplied by g(u) e^{-eps u}.
struct FrequencyNodes {
    std::vector<double> u;
    std::vector<double> weight;
};

inline FrequencyNodes build_frequency_nodes(const GrowthFunction& s_fn, double length, int order, double eps,
                                            double u_max) {
    const double width = std::min(0.1, std::numbers::pi / length);
    const double inner = 2.0 * std::numbers::pi * (order + 3) / length;  // main lobes of all e_n
    FrequencyNodes out;
    std::vector<double> cuts, xs;
    double a = 0.0;
    while (a < u_max) {
        const double w = a < inner ? 0.5 * width : width;
        double b = std::min(u_max, a + w);
        if (a < inner && b > inner) b = inner;
        cuts.assign(1, a);
        xs.clear();
        if (s_fn.jumps && s_fn.jumps(std::exp(a), std::exp(b), 4096, xs)) {
            for (double x : xs) {
                const double u = std::log(x);
                if (u > a && u < b) cuts.push_back(u);
            }
        }
        cuts.push_back(b);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double lo = cuts[c], hi = cuts[c + 1];
            if (!(hi > lo)) continue;
            const int rule_order = std::clamp(static_cast<int>(std::ceil(16.0 * (hi - lo) / w)), 4, 16);
            const auto& rule = gauss_legendre(rule_order);
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double u = mid + half * rule.nodes[i];
                const double x = std::exp(u);
                out.u.push_back(u);
                out.weight.push_back(half * rule.weights[i] * s_fn(x) / x * std::exp(-eps * u));
            }
        }
        a = b;
    }
    return out;
}

inline double default_frequency_cutoff(double length, int order, double eps) {
    double u_max = 2.0 * (std::numbers::pi * order + 1000.0) / length;
    if (eps > 0.0) u_max = std::max(u_max, 25.0 / eps);
    return u_max;
}

}  // namespace detail

/// K_eps(x) = (1/pi) Re G(1 + eps + ix).
inline double kernel(const TransformSpec& spec, double eps, double x) {
    if (!(eps >= 1e-3)) throw Error(ErrorCode::contract, "kernel: eps must be >= 1e-3");
    return spec(Complex(1.0 + eps, x)).value.real() / std::numbers::pi;
}

namespace detail {

/// Breakpoints on [0, L]: geometric grading toward each |peak| from eps/16, then
/// uniform panels no wider than min(0.1, L/(2N)).
inline std::vector<double> kernel_breakpoints(const TransformSpec& spec, double length, int order, double eps) {
    std::vector<double> points;
    for (double p : spec.peaks) append_graded(points, std::abs(p), eps / 16.0, 2.0);
    const double max_width = order > 0 ? std::min(0.1, length / (2.0 * order)) : 0.1;
    return finalize_breakpoints(std::move(points), 0.0, length, max_width);
}

struct KernelSamples {
    std::vector<double> x, w, k_plus, k_minus;
    double est_error = 0.0;
};

inline KernelSamples sample_kernel(const TransformSpec& spec, double length, int order, double eps, int jobs) {
    const auto breaks = kernel_breakpoints(spec, length, order, eps);
    QuadratureGrid grid;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) grid.add_panel(breaks[i], breaks[i + 1]);
    KernelSamples s;
    s.x = grid.nodes;
    s.w = grid.weights;
    const std::size_t count = s.x.size();
    s.k_plus.resize(count);
    s.k_minus.resize(count);
    std::vector<double> err(count);
    parallel_for(count, jobs, [&](std::size_t i) {
        const auto plus = spec(Complex(1.0 + eps, s.x[i]));
        const auto minus = spec(Complex(1.0 + eps, -s.x[i]));
        s.k_plus[i] = plus.value.real() / std::numbers::pi;
        s.k_minus[i] = minus.value.real() / std::numbers::pi;
        err[i] = (plus.est_error + minus.est_error) / std::numbers::pi;
    });
    for (std::size_t i = 0; i < count; ++i) s.est_error += s.w[i] * (length - s.x[i]) / length * err[i];
    return s;
}

inline void require_kernel_args(const IntervalSpec& interval, double eps, int order) {
    interval.validate();
    check_order(order);
    if (!(eps >= 1e-3)) throw Error(ErrorCode::contract, "kernel route: eps must be >= 1e-3");
}

}  // namespace detail

/// Kernel route. The double integral over I x I collapses to a single integral
/// over x = t - tau in [-L, L] against the overlap factor
/// J_d(x) = int exp(2 pi i d tau / L) dtau over {tau, tau + x in I}.
inline OperatorTruncation assemble_kernel_route(const TransformSpec& spec, const IntervalSpec& interval, double eps,
                                                int order, int jobs = 1) {
    detail::require_kernel_args(interval, eps, order);
    const double length = interval.length;
    const double c = 2.0 * std::numbers::pi / length;
    const auto s = detail::sample_kernel(spec, length, order, eps, jobs);
    const std::size_t count = s.x.size();
    const int side = 2 * order + 1;

    // J_d(x) for x > 0 and d = -2N..2N; J_d(-x) = conj(J_d(x)).
    const int d_span = 4 * order + 1;
    std::vector<Complex> overlap(count * d_span);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = s.x[i];
        for (int d = -2 * order; d <= 2 * order; ++d) {
            Complex j;
            if (d == 0) {
                j = length - x;
            } else {
                const double k = c * d;
                const double half_sin = std::sin(0.5 * k * x);
                j = (d % 2 == 0 ? 1.0 : -1.0) * Complex(-std::sin(k * x), 2.0 * half_sin * half_sin) / k;
            }
            overlap[i * d_span + (d + 2 * order)] = j;
        }
    }

    Eigen::MatrixXcd raw(side, side);
    parallel_for(static_cast<std::size_t>(side), jobs, [&](std::size_t row) {
        const int m = static_cast<int>(row) - order;
        std::vector<Complex> acc(side, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            const Complex phase = std::polar(1.0, -c * m * s.x[i]);
            const Complex plus = s.w[i] * s.k_plus[i] * phase;
            const Complex minus = s.w[i] * s.k_minus[i] * std::conj(phase);
            const Complex* jrow = &overlap[i * d_span];
            for (int n = -order; n <= order; ++n) {
                const Complex j = jrow[n - m + 2 * order];
                acc[n + order] += plus * j + minus * std::conj(j);
            }
        }
        for (int col = 0; col < side; ++col) raw(row, col) = acc[col] / length;
    });

    OperatorTruncation out;
    out.interval = interval;
    out.epsilon = eps;
    out.order = order;
    out.source = spec.source.label;
    out.route = Route::kernel_quadrature;
    out.est_error = s.est_error;
    out.entries.resize(side, side);
    for (int r = 0; r < side; ++r) {
        for (int col = 0; col < side; ++col) {
            detail::check_finite(raw(r, col).real(), r - order, col - order, "kernel route");
            out.max_imag = std::max(out.max_imag, std::abs(raw(r, col).imag()));
            out.asymmetry = std::max(out.asymmetry, std::abs(raw(r, col).real() - raw(col, r).real()));
        }
    }
    out.entries = 0.5 * (raw.real() + raw.real().transpose());
    return out;
}

/// Diagonal <W e_n, e_n> for n = n_lo..n_hi by the kernel route.
inline std::vector<double> kernel_route_diagonal(const TransformSpec& spec, const IntervalSpec& interval, double eps,
                                                 int n_lo, int n_hi, int jobs = 1) {
    const int order = std::max(std::abs(n_lo), std::abs(n_hi));
    detail::require_kernel_args(interval, eps, order);
    const double length = interval.length;
    const double c = 2.0 * std::numbers::pi / length;
    const auto s = detail::sample_kernel(spec, length, order, eps, jobs);
    std::vector<double> out(static_cast<std::size_t>(n_hi - n_lo + 1));
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        const int n = n_lo + static_cast<int>(k);
        double sum = 0.0;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            sum += s.w[i] * (length - s.x[i]) * (s.k_plus[i] + s.k_minus[i]) * std::cos(c * n * s.x[i]);
        out[k] = sum / length;
        detail::check_finite(out[k], n, n, "kernel route");
    });
    return out;
}

struct FrequencyOptions {
    double u_max = 0.0;  // 0 selects the automatic cutoff
    int jobs = 1;
};

namespace detail {

struct FrequencySetup {
    FrequencyNodes nodes;
    double u_max = 0.0;
    double x_cut = 0.0;
    double tail_level = 0.0;
    double est_error = 0.0;
    bool analytic_tail = false;
};

inline FrequencySetup frequency_setup(const GrowthFunction& s_fn, const IntervalSpec& interval, double eps, int order,
                                      double u_max) {
    interval.validate();
    check_order(order);
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::contract, "frequency route: eps must be >= 0");
    const double length = interval.length;
    FrequencySetup f;
    f.u_max = u_max > 0.0 ? u_max : default_frequency_cutoff(length, order, eps);
    f.x_cut = 0.5 * f.u_max * length;
    const double margin = f.x_cut - std::numbers::pi * order;
    if (margin < 50.0) {
        const double suggested = 2.0 * (std::numbers::pi * order + 1000.0) / length;
        throw PrecisionError("frequency route: cutoff U too small for order N; suggested U = " +
                                 std::to_string(suggested),
                             0.0);
    }
    if (f.u_max > s_fn.max_u())
        throw TableExhausted(static_cast<std::uint64_t>(std::ceil(std::exp(std::min(f.u_max, 700.0)))),
                             static_cast<std::uint64_t>(s_fn.range_limit));
    if (f.u_max > 700.0)
        throw PrecisionError("frequency route: cutoff U = " + std::to_string(f.u_max) +
                                 " exceeds the double range of e^u; use the kernel route for this eps",
                             0.0);
    const double window_tail = (2.0 / std::numbers::pi) / margin;
    if (eps == 0.0) {
        if (!s_fn.tail)
            throw Error(ErrorCode::contract,
                        "frequency route at eps = 0 needs a tail model for " + s_fn.label);
        f.analytic_tail = true;
        f.tail_level = s_fn.tail->level;
        f.est_error = s_fn.tail->deviation(f.u_max) * window_tail;
    } else {
        f.est_error = s_fn.growth_constant * std::exp(-eps * f.u_max) * window_tail;
    }
    f.nodes = build_frequency_nodes(s_fn, length, order, eps, f.u_max);
    return f;
}

}  // namespace detail

/// Frequency route on [-U, U] with the closed-form sinc-product tail at eps = 0.
inline OperatorTruncation assemble_frequency_route(const GrowthFunction& s_fn, const IntervalSpec& interval, double eps,
                                                   int order, const FrequencyOptions& options = {}) {
    const auto f = detail::frequency_setup(s_fn, interval, eps, order, options.u_max);
    const double length = interval.length;
    const int side = 2 * order + 1;
    const std::size_t count = f.nodes.u.size();
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    std::vector<Eigen::MatrixXd> partial(chunks);
    parallel_for(chunks, options.jobs, [&](std::size_t c) {
        const std::size_t lo = c * kChunk, hi = std::min(count, lo + kChunk);
        const auto rows = static_cast<Eigen::Index>(2 * (hi - lo));
        Eigen::MatrixXd basis(rows, side);
        Eigen::VectorXd weight(rows);
        for (std::size_t i = lo; i < hi; ++i) {
            const double x = 0.5 * f.nodes.u[i] * length;
            const auto r = static_cast<Eigen::Index>(2 * (i - lo));
            weight(r) = weight(r + 1) = f.nodes.weight[i];
            for (int n = -order; n <= order; ++n) {
                const double shift = std::numbers::pi * n;
                basis(r, n + order) = detail::sinc(x - shift);
                basis(r + 1, n + order) = detail::sinc(-x - shift);
            }
        }
        partial[c] = basis.transpose() * weight.asDiagonal() * basis;
    });
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(side, side);
    for (const auto& p : partial) m += p;
    m *= length / (2.0 * std::numbers::pi);

    if (f.analytic_tail && f.tail_level != 0.0) {
        for (int a = -order; a <= order; ++a) {
            for (int b = a; b <= order; ++b) {
                const double t = detail::sinc_product_tail(f.x_cut, a, b) + detail::sinc_product_tail(f.x_cut, -a, -b);
                const double add = f.tail_level / std::numbers::pi * t;
                m(a + order, b + order) += add;
                if (a != b) m(b + order, a + order) += add;
            }
        }
    }

    OperatorTruncation out;
    out.interval = interval;
    out.epsilon = eps;
    out.order = order;
    out.source = s_fn.label;
    out.route = Route::frequency_formula;
    out.est_error = f.est_error;
    for (int r = 0; r < side; ++r)
        for (int col = 0; col < side; ++col) {
            detail::check_finite(m(r, col), r - order, col - order, "frequency route");
            out.asymmetry = std::max(out.asymmetry, std::abs(m(r, col) - m(col, r)));
        }
    out.entries = 0.5 * (m + m.transpose());
    return out;
}

/// Diagonal <W e_n, e_n> for n = n_lo..n_hi by the frequency route (no full matrix).
inline std::vector<double> frequency_route_diagonal(const GrowthFunction& s_fn, const IntervalSpec& interval, double eps,
                                                    int n_lo, int n_hi, const FrequencyOptions& options = {},
                                                    double* est_error = nullptr) {
    const int order = std::max(std::abs(n_lo), std::abs(n_hi));
    const auto f = detail::frequency_setup(s_fn, interval, eps, order, options.u_max);
    const double length = interval.length;
    std::vector<double> out(static_cast<std::size_t>(n_hi - n_lo + 1));
    parallel_for(out.size(), options.jobs, [&](std::size_t k) {
        const int n = n_lo + static_cast<int>(k);
        const double shift = std::numbers::pi * n;
        double sum = 0.0;
        for (std::size_t i = 0; i < f.nodes.u.size(); ++i) {
            const double x = 0.5 * f.nodes.u[i] * length;
            const double p = detail::sinc(x - shift), q = detail::sinc(-x - shift);
            sum += f.nodes.weight[i] * (p * p + q * q);
        }
        double value = sum * length / (2.0 * std::numbers::pi);
        if (f.analytic_tail && f.tail_level != 0.0)
            value += f.tail_level / std::numbers::pi *
                     (detail::sinc_product_tail(f.x_cut, n, n) + detail::sinc_product_tail(f.x_cut, -n, -n));
        detail::check_finite(value, n, n, "frequency route");
        out[k] = value;
    });
    if (est_error) *est_error = f.est_error;
    return out;
}

/// Psi = W - A Id.
inline OperatorTruncation split_identity(const OperatorTruncation& w, double a) {
    OperatorTruncation psi = w;
    psi.entries.diagonal().array() -= a;
    psi.A = w.A + a;
    return psi;
}

/// <Psi e_n, e_n> = <W e_n, e_n> - A for n = 0..n_max by the frequency route.
/// eps = 0 is allowed when the source carries a tail model.
inline std::vector<double> diagonal_sequence(const GrowthFunction& s_fn, const IntervalSpec& interval, double eps,
                                             double a, int n_max, const FrequencyOptions& options = {}) {
    if (n_max < 0) throw Error(ErrorCode::contract, "diagonal_sequence: n_max must be >= 0");
    auto d = frequency_route_diagonal(s_fn, interval, eps, 0, n_max, options);
    for (double& v : d) v -= a;
    return d;
}

/// Eigenvalues of a symmetric matrix, sorted by absolute value, largest first.
inline std::vector<double> spectrum(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::contract, "spectrum: matrix must be square");
    if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw Error(ErrorCode::contract, "spectrum: matrix is not symmetric within 1e-9");
    if (m.size() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::numeric, "spectrum: eigensolver failed");
    std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
    std::stable_sort(values.begin(), values.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
    return values;
}

inline std::vector<double> spectrum(const OperatorTruncation& m) { return spectrum(m.entries); }

struct WeakLimitReport {
    std::vector<double> schedule;
    std::vector<double> deltas;    // max |M(eps_{k+1}) - M(eps_k)|
    std::vector<double> ratios;    // deltas[k] / deltas[k+1]
    std::vector<double> required;  // 1.5^{log2(eps_k / eps_{k+1})}
    std::vector<std::vector<double>> diagonals;
    bool cauchy = false;
};

/// Assembles M(eps) along a strictly decreasing schedule and checks that the
/// successive entrywise differences shrink by at least 1.5 per halving of eps.
inline WeakLimitReport weak_limit_diagnostic(const TransformSpec& spec, const IntervalSpec& interval, int order,
                                             const std::vector<double>& schedule, int jobs = 1) {
    if (schedule.size() < 2) throw Error(ErrorCode::contract, "weak_limit_diagnostic: need at least two eps values");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (!(schedule[k] > 0.0)) throw Error(ErrorCode::contract, "weak_limit_diagnostic: eps must be positive");
        if (k > 0 && !(schedule[k] < schedule[k - 1]))
            throw Error(ErrorCode::contract, "weak_limit_diagnostic: schedule must be strictly decreasing");
    }
    WeakLimitReport r;
    r.schedule = schedule;
    std::vector<Eigen::MatrixXd> mats;
    for (double eps : schedule) {
        auto m = assemble_kernel_route(spec, interval, eps, order, jobs);
        const Eigen::VectorXd diag = m.entries.diagonal();
        r.diagonals.emplace_back(diag.begin(), diag.end());
        mats.push_back(std::move(m.entries));
    }
    for (std::size_t k = 0; k + 1 < mats.size(); ++k)
        r.deltas.push_back(mats.front().size() ? (mats[k + 1] - mats[k]).cwiseAbs().maxCoeff() : 0.0);
    r.cauchy = true;
    for (std::size_t k = 0; k + 1 < r.deltas.size(); ++k) {
        const double need = std::pow(1.5, std::log2(schedule[k] / schedule[k + 1]));
        const double ratio = r.deltas[k + 1] == 0.0 ? std::numeric_limits<double>::infinity()
                                                    : r.deltas[k] / r.deltas[k + 1];
        r.ratios.push_back(ratio);
        r.required.push_back(need);
        // Identically zero differences are trivially Cauchy.
        if (!(r.deltas[k] == 0.0 && r.deltas[k + 1] == 0.0) && ratio < need) r.cauchy = false;
    }
    return r;
}

/// Smallest eigenvalue, for positivity checks.
inline double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// Shortest round-trip decimal text of v.
inline std::string format_number(double v) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// CSV: one header comment, one comment naming the index order, then 2N+1 rows.
inline void write_matrix_csv(std::ostream& out, const OperatorTruncation& m) {
    out << "# tauberlab-matrix v1, L=" << format_number(m.interval.length) << ", eps=" << format_number(m.epsilon)
        << ", N=" << m.order << ", source=" << m.source << ", route=" << to_string(m.route)
        << ", A=" << format_number(m.A) << "\n";
    out << "# rows m and columns n run from " << -m.order << " to " << m.order << "\n";
    for (int r = 0; r < m.side(); ++r) {
        for (int c = 0; c < m.side(); ++c) {
            if (c) out << ',';
            out << format_number(m.entries(r, c));
        }
        out << '\n';
    }
}

}  // namespace tauberlab
