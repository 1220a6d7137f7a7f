#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tauberlab/operator.hpp"

using namespace tauberlab;

namespace {

constexpr double kPi = std::numbers::pi;

double poisson(double eps, double x) { return eps / (kPi * (eps * eps + x * x)); }

// (1/L) int_{-L}^{L} (L - |x|) K(x) cos(2 pi n x / L) dx for an even kernel.
double reduced_oracle(const std::function<double(double)>& k, double length, int n, double scale) {
    const double c = 2.0 * kPi / length;
    auto f = [&](double x) { return (length - x) * k(x) * std::cos(c * n * x); };
    std::vector<double> cuts;
    for (double d = scale; d < length; d *= 2.0) cuts.push_back(d);
    return 2.0 * oracle::integrate_split(f, cuts, 0.0, length, 1e-13) / length;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Kernel, Examples) {
    EXPECT_NEAR(kernel(identity_transform(), 0.1, 0.0), 10.0 / kPi, 1e-12);
    for (double x : {0.0, 0.3, 2.0, 17.0}) EXPECT_NEAR(kernel(identity_transform(), 0.05, x), poisson(0.05, x), 1e-14);
    const double zeta11 = oracle::zeta_partial(1.1, 20000).real();
    EXPECT_NEAR(kernel(integers_transform(), 0.1, 0.0), zeta11 / 1.1 / kPi, 1e-9);
    EXPECT_NEAR(kernel(integers_transform(), 0.1, 0.0), 3.0627, 1e-3);
    EXPECT_THROW(kernel(identity_transform(), 1e-4, 0.0), Error);
}

TEST(Kernel, Even) {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> dist(-30.0, 30.0);
    const std::vector<TransformSpec> specs = {identity_transform(), integers_transform(), sqrt_perturbed_transform(),
                                              oscillating_transform(), single_step_transform()};
    for (const auto& spec : specs)
        for (int k = 0; k < 100; ++k) {
            const double x = dist(rng);
            ASSERT_NEAR(kernel(spec, 0.05, -x), kernel(spec, 0.05, x), 1e-12) << spec.source.label << " " << x;
        }
}

TEST(Basis, Orthonormal) {
    const double length = 8.0 * kPi, c = 2.0 * kPi / length;
    for (int m = -3; m <= 3; ++m)
        for (int n = -3; n <= 3; ++n) {
            const double re = oracle::integrate([&](double t) { return std::cos(c * (n - m) * t) / length; },
                                                -length / 2, length / 2);
            const double im = oracle::integrate([&](double t) { return std::sin(c * (n - m) * t) / length; },
                                                -length / 2, length / 2);
            EXPECT_NEAR(re, m == n ? 1.0 : 0.0, 1e-10);
            EXPECT_NEAR(im, 0.0, 1e-10);
        }
}

// (1/L) int int P_eps(t - tau) = (2/(pi L)) [L atan(L/eps) - (eps/2) ln(1 + L^2/eps^2)].
TEST(KernelRoute, SingleEntryClosedForm) {
    const double length = 2.0 * kPi, eps = 0.1;
    const auto m = assemble_kernel_route(identity_transform(), {length}, eps, 0);
    ASSERT_EQ(m.side(), 1);
    const double exact = 2.0 / (kPi * length) *
                         (length * std::atan(length / eps) - 0.5 * eps * std::log1p(length * length / (eps * eps)));
    EXPECT_NEAR(m.at(0, 0), exact, 1e-10);
    EXPECT_NEAR(m.at(0, 0), reduced_oracle([&](double x) { return poisson(eps, x); }, length, 0, eps), 1e-10);
}

TEST(KernelRoute, PoissonDiagonalsAgainstOracle) {
    const double length = 2.0 * kPi;
    const auto coarse = assemble_kernel_route(identity_transform(), {length}, 0.1, 4);
    const auto fine = assemble_kernel_route(identity_transform(), {length}, 0.01, 4);
    for (int n = -4; n <= 4; ++n) {
        const double want = reduced_oracle([](double x) { return poisson(0.1, x); }, length, n, 0.1);
        EXPECT_NEAR(coarse.at(n, n), want, 1e-9) << n;
        EXPECT_GT(coarse.at(n, n), 0.0);
        EXPECT_LT(coarse.at(n, n), 1.0);
        EXPECT_GT(fine.at(n, n), coarse.at(n, n)) << n;  // approximate identity as eps -> 0
        EXPECT_LT(fine.at(n, n), 1.0);
    }
    EXPECT_TRUE(coarse.entries.isApprox(coarse.entries.transpose()));
    EXPECT_EQ(coarse.route, Route::kernel_quadrature);
}

// Independent two-dimensional quadrature of <K e_n, e_m>.
TEST(KernelRoute, TensorQuadratureOracle) {
    const double length = 2.0 * kPi, eps = 0.1;
    const auto spec = sqrt_perturbed_transform();
    const auto m = assemble_kernel_route(spec, {length}, eps, 2);
    auto k = [&](double x) { return kernel(spec, eps, x); };
    for (auto [r, c] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{-2, 1}, std::pair{2, 0}})
        EXPECT_NEAR(m.at(r, c), oracle::tensor_matrix_element(k, length, r, c, eps), 1e-7) << r << "," << c;
}

TEST(KernelRoute, Errors) {
    const IntervalSpec i{2.0 * kPi};
    try {
        assemble_kernel_route(identity_transform(), i, 5e-4, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::contract);
    }
    EXPECT_THROW(assemble_kernel_route(identity_transform(), i, 0.1, 257), Error);
    EXPECT_THROW(assemble_kernel_route(identity_transform(), IntervalSpec{-1.0}, 0.1, 4), Error);
}

TEST(FrequencyRoute, PlancherelNormalization) {
    for (double length : {2.0 * kPi, 8.0 * kPi}) {
        const auto m = assemble_frequency_route(identity_growth(), {length}, 0.0, 64);
        for (int n = -64; n <= 64; ++n) ASSERT_NEAR(m.at(n, n), 1.0, 1e-8) << "L=" << length << " n=" << n;
        for (int n = -64; n <= 64; ++n)
            for (int k = -64; k <= 64; ++k)
                if (k != n) {
                    ASSERT_NEAR(m.at(n, k), 0.0, 1e-8);
                }
        EXPECT_EQ(m.route, Route::frequency_formula);
    }
}

TEST(FrequencyRoute, Errors) {
    const IntervalSpec i{2.0 * kPi};
    EXPECT_THROW(assemble_frequency_route(identity_growth(), i, 0.01, 8), PrecisionError);
    EXPECT_THROW(assemble_frequency_route(identity_growth(), i, 0.1, 8, {5.0, 1}), PrecisionError);
    EXPECT_THROW(assemble_frequency_route(identity_growth(), i, -0.1, 8), Error);
    const auto table = PrimeTable::sieve(1000);
    EXPECT_THROW(assemble_frequency_route(primes_growth(table), i, 0.1, 8), TableExhausted);
    GrowthFunction no_tail = identity_growth();
    no_tail.tail.reset();
    try {
        assemble_frequency_route(no_tail, i, 0.0, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::contract);
    }
}

// Kernel route and frequency route agree within 1e-5 for N <= 8, eps >= 0.05.
TEST(OperatorProperties, RouteEquivalence) {
    const std::vector<TransformSpec> specs = {identity_transform(), integers_transform(), sqrt_perturbed_transform()};
    for (const auto& spec : specs)
        for (double eps : {0.05, 0.1, 0.4})
            for (double length : {2.0 * kPi, 8.0 * kPi}) {
                const auto k = assemble_kernel_route(spec, {length}, eps, 8);
                const auto f = assemble_frequency_route(spec.source, {length}, eps, 8);
                EXPECT_LT(max_abs_diff(k.entries, f.entries), 1e-5)
                    << spec.source.label << " eps=" << eps << " L=" << length;
            }
}

// Odd m + n entries carry the (-1)^{m+n} sign and match the kernel route.
TEST(OperatorProperties, ParityOfOffDiagonals) {
    const double length = 2.0 * kPi;
    const auto f = assemble_frequency_route(integers_growth(), {length}, 0.1, 4);
    const auto k = assemble_kernel_route(integers_transform(), {length}, 0.1, 4);
    for (int m = -4; m <= 4; ++m)
        for (int n = -4; n <= 4; ++n) {
            if ((m + n) % 2 == 0) continue;
            EXPECT_NEAR(f.at(m, n), k.at(m, n), 1e-6);
        }
}

TEST(OperatorProperties, SymmetryRealnessPositivity) {
    const auto specs = std::vector<TransformSpec>{identity_transform(),   integers_transform(),
                                                  sqrt_perturbed_transform(), sqrt_perturbed_transform(2.0),
                                                  oscillating_transform(), single_step_transform()};
    for (const auto& spec : specs)
        for (double eps : {0.05, 0.2}) {
            for (const auto& m : {assemble_kernel_route(spec, {8.0 * kPi}, eps, 8),
                                  assemble_frequency_route(spec.source, {8.0 * kPi}, eps, 8)}) {
                EXPECT_LT(m.asymmetry, 1e-9) << spec.source.label;
                EXPECT_LT(m.max_imag, 1e-9) << spec.source.label;
                EXPECT_LT(max_abs_diff(m.entries, m.entries.transpose()), 1e-9);
                EXPECT_GE(min_eigenvalue(m.entries), -1e-8) << spec.source.label << " " << to_string(m.route);
            }
        }
    const auto slow = assemble_frequency_route(slow_growth(), {8.0 * kPi}, 0.05, 8);
    EXPECT_GE(min_eigenvalue(slow.entries), -1e-8);
}

// W(pi_N) - W(x) is the operator of the psi kernel.
TEST(OperatorProperties, PoissonSplit) {
    const IntervalSpec i{2.0 * kPi};
    const auto w_int = assemble_frequency_route(integers_growth(), i, 0.1, 8);
    const auto w_x = assemble_frequency_route(identity_growth(), i, 0.1, 8);
    const auto psi = assemble_kernel_route(psi_transform(), i, 0.1, 8);
    EXPECT_LT(max_abs_diff(w_int.entries - w_x.entries, psi.entries), 1e-6);
}

TEST(SplitIdentity, Examples) {
    const auto w = assemble_frequency_route(integers_growth(), {2.0 * kPi}, 0.1, 4);
    const auto same = split_identity(w, 0.0);
    EXPECT_EQ(same.entries, w.entries);
    const auto psi = split_identity(w, 1.0);
    EXPECT_EQ(psi.A, 1.0);
    for (int n = -4; n <= 4; ++n) {
        EXPECT_DOUBLE_EQ(psi.at(n, n), w.at(n, n) - 1.0);
        if (n != 0) {
            EXPECT_EQ(psi.at(n, 0), w.at(n, 0));
        }
    }
}

// h(u) = floor(e^u)e^{-u} - 1 -> 0 drives the decay. At eps > 0 the identity split also carries the
// Poisson deficit 1 - <P_eps e_n, e_n>, which grows with n, so the eps > 0 check uses W_S - A W_x.
TEST(SplitIdentity, IntegersDiagonalDecreases) {
    const IntervalSpec i{8.0 * kPi};
    const auto d0 = diagonal_sequence(integers_growth(), i, 0.0, 1.0, 64);
    const auto w = frequency_route_diagonal(integers_growth(), i, 0.05, 0, 64);
    const auto p = frequency_route_diagonal(identity_growth(), i, 0.05, 0, 64);
    const auto d = diagonal_sequence(integers_growth(), i, 0.05, 1.0, 64);
    for (int n = 16; n < 64; ++n) {
        EXPECT_GT(std::abs(d0[n]), std::abs(d0[n + 1])) << n;
        EXPECT_GT(std::abs(w[n] - p[n]), std::abs(w[n + 1] - p[n + 1])) << n;
        EXPECT_LT(std::abs(d[n]), std::abs(d[n + 1])) << n;
    }
    EXPECT_LT(std::abs(d0[64]), 1e-4);
}

TEST(DiagonalSequence, ZeroHIsZero) {
    GrowthFunction one = identity_growth();
    for (double v : diagonal_sequence(one, {2.0 * kPi}, 0.0, 1.0, 20)) EXPECT_NEAR(v, 0.0, 1e-8);
    for (double v : diagonal_sequence(zero_growth(), {2.0 * kPi}, 0.0, 0.0, 20)) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(diagonal_sequence(zero_growth(), {2.0 * kPi}, 0.0, 0.0, -1), Error);
}

// h(u) = e^{-u/2}: value at n = 0 is (L/pi) int_0^inf e^{-u/2} sinc^2(uL/2) du.
TEST(DiagonalSequence, SqrtPerturbedAgainstQuadrature) {
    const double length = 2.0 * kPi;
    const auto d = diagonal_sequence(sqrt_perturbed_growth(), {length}, 0.0, 1.0, 20);
    auto f = [&](double u) {
        const double x = 0.5 * u * length;
        const double s = x == 0.0 ? 1.0 : std::sin(x) / x;
        return std::exp(-0.5 * u) * s * s;
    };
    std::vector<double> cuts;
    for (double u = 1.0; u < 80.0; u += 1.0) cuts.push_back(u);
    EXPECT_NEAR(d[0], length / kPi * oracle::integrate_split(f, cuts, 0.0, 80.0), 1e-8);
    for (int n = 0; n < 20; ++n) {
        EXPECT_GT(d[n], 0.0);
        EXPECT_GT(d[n], d[n + 1]);
    }
    EXPECT_LT(d[20], 0.05 * d[0]);
}

// h(u) = sin(u)/2 keeps the diagonal away from zero.
TEST(DiagonalSequence, OscillatingCounterexample) {
    const double length = 8.0 * kPi;
    const auto d = diagonal_sequence(oscillating_growth(), {length}, 0.0, 1.0, 64);
    double band = 0.0;
    for (int n = 32; n <= 64; ++n) band = std::max(band, std::abs(d[n]));
    EXPECT_GE(band, 0.05);

    const int n = 40;
    auto f = [&](double u) {
        const double x = 0.5 * u * length;
        auto sinc = [](double y) { return y == 0.0 ? 1.0 : std::sin(y) / y; };
        const double p = sinc(x - kPi * n), q = sinc(-x - kPi * n);
        return 0.5 * std::sin(u) * (p * p + q * q);
    };
    std::vector<double> cuts;
    for (double u = 0.125; u < 400.0; u += 0.25) cuts.push_back(u);
    const double want = length / (2.0 * kPi) * oracle::integrate_split(f, cuts, 0.0, 400.0, 1e-11);
    EXPECT_NEAR(d[n], want, 1e-4);
}

TEST(Spectrum, Examples) {
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 5);
    for (double v : spectrum(zero)) EXPECT_EQ(v, 0.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d.diagonal() << 3, 1, 2;
    const auto ev = spectrum(d);
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_NEAR(ev[0], 3.0, 1e-14);
    EXPECT_NEAR(ev[1], 2.0, 1e-14);
    EXPECT_NEAR(ev[2], 1.0, 1e-14);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = 1e-6;
    try {
        spectrum(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::contract);
    }
}

TEST(Spectrum, PoissonCompressionIsContraction) {
    for (const auto& m : {assemble_kernel_route(identity_transform(), {2.0 * kPi}, 0.01, 8),
                          assemble_frequency_route(identity_growth(), {2.0 * kPi}, 0.0, 8)}) {
        for (double v : spectrum(m)) {
            EXPECT_GE(v, -1e-8);
            EXPECT_LE(v, 1.0 + 1e-8);
        }
    }
}

TEST(WeakLimit, PoissonConverges) {
    const auto r = weak_limit_diagnostic(identity_transform(), {2.0 * kPi}, 8, {0.05, 0.025, 0.0125, 0.00625});
    EXPECT_TRUE(r.cauchy);
    for (std::size_t k = 0; k + 1 < r.deltas.size(); ++k) EXPECT_GT(r.deltas[k], r.deltas[k + 1]);
    for (double v : r.diagonals.back()) EXPECT_GT(v, 0.94);
}

TEST(WeakLimit, ZeroSourceIsTriviallyCauchy) {
    const auto r = weak_limit_diagnostic(zero_transform(), {2.0 * kPi}, 4, {0.4, 0.2, 0.1, 0.05});
    for (double d : r.deltas) EXPECT_EQ(d, 0.0);
    EXPECT_TRUE(r.cauchy);
}

TEST(WeakLimit, IntegersReportShape) {
    const std::vector<double> literal = {0.4, 0.2, 0.1, 0.05};
    const auto r = weak_limit_diagnostic(integers_transform(), {2.0 * kPi}, 8, literal);
    ASSERT_EQ(r.deltas.size(), 3u);
    ASSERT_EQ(r.ratios.size(), 2u);
    for (double need : r.required) EXPECT_NEAR(need, 1.5, 1e-12);
    for (std::size_t k = 0; k < r.ratios.size(); ++k) EXPECT_DOUBLE_EQ(r.ratios[k], r.deltas[k] / r.deltas[k + 1]);
    EXPECT_EQ(r.diagonals.size(), literal.size());
    EXPECT_EQ(r.cauchy, r.ratios[0] >= 1.5 && r.ratios[1] >= 1.5);

    // Once N eps is small the differences halve with eps.
    const auto late = weak_limit_diagnostic(integers_transform(), {2.0 * kPi}, 8, {0.05, 0.025, 0.0125, 0.00625});
    EXPECT_TRUE(late.cauchy);
}

TEST(WeakLimit, ScheduleValidation) {
    EXPECT_THROW(weak_limit_diagnostic(identity_transform(), {2.0 * kPi}, 2, {0.1}), Error);
    EXPECT_THROW(weak_limit_diagnostic(identity_transform(), {2.0 * kPi}, 2, {0.1, 0.2}), Error);
    EXPECT_THROW(weak_limit_diagnostic(identity_transform(), {2.0 * kPi}, 2, {0.1, -0.2}), Error);
}

TEST(MatrixCsv, HeaderAndRoundTrip) {
    const auto m = assemble_frequency_route(integers_growth(), {2.0 * kPi}, 0.1, 2);
    std::ostringstream out;
    write_matrix_csv(out, m);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# tauberlab-matrix v1, L=6.283185307179586, eps=0.1, N=2, source=pi_N, "
                         "route=frequency_formula, A=0",
                         0),
              0u);
    std::getline(in, line);
    EXPECT_EQ(line, "# rows m and columns n run from -2 to 2");
    for (int r = 0; r < 5; ++r) {
        ASSERT_TRUE(std::getline(in, line));
        std::istringstream cells(line);
        std::string cell;
        for (int c = 0; c < 5; ++c) {
            ASSERT_TRUE(std::getline(cells, cell, ','));
            EXPECT_EQ(std::strtod(cell.c_str(), nullptr), m.entries(r, c));
        }
    }
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(format_number(1.0), "1");
}
