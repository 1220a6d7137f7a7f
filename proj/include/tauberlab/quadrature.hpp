#pragma once

// Gauss-Legendre rules and composite panel grids shared by the transform
// and operator modules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

namespace tauberlab {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule make_gauss_legendre(int order) {
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    // P_order(x) and its derivative by the three-term recurrence.
    auto legendre = [order](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, order * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

}  // namespace detail

inline constexpr int kMaxGaussOrder = 32;

/// Cached Gauss-Legendre rule of the given order (1..32).
inline const GaussLegendreRule& gauss_legendre(int order) {
    static const std::array<GaussLegendreRule, kMaxGaussOrder + 1> rules = [] {
        std::array<GaussLegendreRule, kMaxGaussOrder + 1> r;
        for (int n = 1; n <= kMaxGaussOrder; ++n) r[n] = detail::make_gauss_legendre(n);
        return r;
    }();
    return rules[std::clamp(order, 1, kMaxGaussOrder)];
}

/// Flat list of quadrature nodes and weights assembled panel by panel.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    void add_panel(double a, double b, int order = 16) {
        if (!(b > a)) return;
        const auto& rule = gauss_legendre(order);
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            nodes.push_back(mid + half * rule.nodes[i]);
            weights.push_back(half * rule.weights[i]);
        }
    }

    std::size_t size() const { return nodes.size(); }

    template <class F>
    auto integrate(F&& f) const {
        using R = decltype(f(0.0));
        R sum{};
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

/// Breakpoints graded geometrically toward `center` on both sides: center +/- width*2^j
/// for width = finest, 2*finest, ... while below `reach`.
inline void append_graded(std::vector<double>& points, double center, double finest, double reach) {
    points.push_back(center);
    for (double d = finest; d < reach; d *= 2.0) {
        points.push_back(center - d);
        points.push_back(center + d);
    }
}

/// Sorts, clips to [lo, hi] (both included) and subdivides gaps wider than `max_width`.
inline std::vector<double> finalize_breakpoints(std::vector<double> points, double lo, double hi,
                                                double max_width) {
    points.push_back(lo);
    points.push_back(hi);
    std::erase_if(points, [&](double p) { return p < lo || p > hi; });
    std::sort(points.begin(), points.end());
    std::vector<double> out;
    for (double p : points) {
        if (!out.empty() && p - out.back() <= 1e-14 * std::max(1.0, std::abs(p))) continue;
        if (!out.empty()) {
            const double gap = p - out.back();
            if (gap > max_width) {
                const int pieces = static_cast<int>(std::ceil(gap / max_width));
                const double start = out.back();
                for (int k = 1; k < pieces; ++k) out.push_back(start + gap * k / pieces);
            }
        }
        out.push_back(p);
    }
    return out;
}

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index must
/// write only its own output slot; results are then independent of `jobs`.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tauberlab
