#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tauberlab/special.hpp"

using namespace tauberlab;

namespace {

const EvalTolerance kFine{1e-13, 1'000'000};

std::vector<Complex> random_points(std::uint64_t seed, int count, double sig_lo, double sig_hi, double t_max) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sig(sig_lo, sig_hi), t(-t_max, t_max);
    std::vector<Complex> out;
    for (int k = 0; k < count; ++k) out.emplace_back(sig(rng), t(rng));
    return out;
}

// Direct prime sums sum_p w(p) p^{-s} with p up to 10^6.
const std::vector<std::uint32_t>& oracle_primes() {
    static const auto primes = oracle::primes_below(1'000'000);
    return primes;
}

Complex direct_prime_sum(Complex s, bool weighted) {
    Complex sum = 0.0;
    const auto& ps = oracle_primes();
    for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
        const double lp = std::log(static_cast<double>(*it));
        sum += (weighted ? -lp : 1.0) * std::exp(-s * lp);
    }
    return sum;
}

double gamma0() {
    static const double g = oracle::stieltjes0();
    return g;
}

double gamma1() {
    static const double g = oracle::stieltjes1();
    return g;
}

}  // namespace

TEST(Zeta, KnownValues) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto z2 = zeta(2.0), z4 = zeta(4.0);
    EXPECT_LE(std::abs(z2.value.real() - pi2 / 6.0), z2.est_error);
    EXPECT_LE(std::abs(z4.value.real() - pi2 * pi2 / 90.0), z4.est_error);
    EXPECT_LT(z2.est_error, 1e-10);
    EXPECT_NEAR(zeta(1.5).value.real(), oracle::zeta_partial(1.5).real(), 1e-11);
    EXPECT_NEAR(zeta(1.5).value.real(), 2.6123753487, 1e-9);
    EXPECT_EQ(zeta(3.0).value.imag(), 0.0);
}

TEST(Zeta, DomainErrors) {
    for (Complex s : {Complex(1.0, 0.0), Complex(0.5, 3.0), Complex(1.0, 14.0)}) {
        try {
            zeta(s);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::domain);
        }
    }
    EXPECT_THROW(zeta_deriv(0.9), Error);
    EXPECT_THROW(prime_zeta(1.0), Error);
    EXPECT_THROW(prime_zeta_deriv(-2.0), Error);
    EXPECT_THROW(psi_entire(1.0), Error);
    EXPECT_THROW(psi_prime_part(0.0), Error);
    EXPECT_THROW(zeta(Complex(std::nan(""), 0.0)), Error);
}

TEST(Zeta, BudgetExhaustionIsPrecisionError) {
    try {
        zeta(Complex(1.001, 900.0), EvalTolerance{1e-12, 100});
        FAIL();
    } catch (const PrecisionError& e) {
        EXPECT_GT(e.achieved(), 1e-12);
    }
}

TEST(Zeta, AgreesWithPartialSumOracle) {
    for (Complex s : random_points(21, 50, 1.01, 4.0, 30.0)) {
        const auto z = zeta(s);
        EXPECT_LT(std::abs(z.value - oracle::zeta_partial(s)), 1e-10) << s;
        EXPECT_LT(z.est_error, 1e-9);
    }
}

TEST(Zeta, NearTheLine) {
    for (double eps : {1e-3, 1e-2}) {
        for (double t : {0.0, 1.0, 14.134, 30.0}) {
            const Complex s(1.0 + eps, t);
            EXPECT_LT(std::abs(zeta(s).value - oracle::zeta_partial(s, 20000)), 1e-9) << s;
        }
    }
}

TEST(ZetaDeriv, KnownValuesAndOracle) {
    EXPECT_NEAR(zeta_deriv(2.0).value.real(), -0.9375482543, 1e-9);
    EXPECT_LT(std::abs(zeta_deriv(2.5).value.imag()), 1e-10);
    for (Complex s : random_points(22, 50, 1.01, 4.0, 30.0))
        EXPECT_LT(std::abs(zeta_deriv(s).value - oracle::zeta_deriv_partial(s)), 1e-9) << s;
}

// F(conj s) = conj F(s) for all six evaluators, 100 random points.
TEST(SpecialProperties, Reflection) {
    const std::vector<std::function<Complex(Complex)>> fns = {
        [](Complex s) { return zeta(s).value; },           [](Complex s) { return zeta_deriv(s).value; },
        [](Complex s) { return prime_zeta(s).value; },     [](Complex s) { return prime_zeta_deriv(s).value; },
        [](Complex s) { return psi_entire(s).value; },     [](Complex s) { return psi_prime_part(s).value; }};
    for (Complex s : random_points(23, 100, 1.001, 3.0, 50.0)) {
        for (std::size_t f = 0; f < fns.size(); ++f) {
            const Complex a = fns[f](std::conj(s)), b = std::conj(fns[f](s));
            ASSERT_LT(std::abs(a - b), 1e-10) << "fn " << f << " at " << s;
        }
    }
}

// Central differences at h = 1e-5, 50 random points.
TEST(SpecialProperties, DerivativeConsistency) {
    const double h = 1e-5;
    for (Complex s : random_points(24, 50, 1.05, 3.0, 20.0)) {
        const Complex fd_z = (zeta(s + h, kFine).value - zeta(s - h, kFine).value) / (2 * h);
        EXPECT_LT(std::abs(zeta_deriv(s, kFine).value - fd_z), 1e-6) << s;
        const Complex fd_p = (prime_zeta(s + h, kFine).value - prime_zeta(s - h, kFine).value) / (2 * h);
        EXPECT_LT(std::abs(prime_zeta_deriv(s, kFine).value - fd_p), 1e-6) << s;
    }
}

TEST(LogZeta, ExpRoundTripAndRealAxis) {
    for (Complex s : random_points(25, 60, 1.001, 3.0, 40.0)) {
        const auto l = log_zeta(s);
        EXPECT_LT(std::abs(std::exp(l.value) - zeta(s).value), 1e-9 * std::abs(zeta(s).value)) << s;
    }
    for (double sigma : {1.0005, 1.01, 1.5, 3.0}) {
        const auto l = log_zeta(sigma);
        EXPECT_EQ(l.value.imag(), 0.0);
        EXPECT_NEAR(l.value.real(), std::log(zeta(sigma).value.real()), 1e-12);
    }
}

// Where log zeta(sigma) > pi the principal branch can be wrong; the tracked
// branch must vary continuously in t.
TEST(LogZeta, ContinuousBranchAlongT) {
    const double sigma = 1.0005;
    double prev = log_zeta(Complex(sigma, 0.0)).value.imag();
    for (double t = 1e-6; t <= 0.2; t *= 1.05) {
        const double cur = log_zeta(Complex(sigma, t)).value.imag();
        ASSERT_LT(std::abs(cur - prev), 0.2) << t;
        prev = cur;
    }
    const Complex s(sigma, 0.2);
    EXPECT_NEAR(log_zeta(s).value.imag(), std::arg(oracle::zeta_partial(s, 20000)), 1e-8);
}

TEST(LogZeta, EulerProductOracle) {
    const auto& ps = oracle_primes();
    for (Complex s : random_points(26, 10, 2.5, 4.0, 20.0)) {
        Complex sum = 0.0;
        for (auto it = ps.rbegin(); it != ps.rend(); ++it)
            sum -= std::log(1.0 - std::exp(-s * std::log(static_cast<double>(*it))));
        EXPECT_LT(std::abs(log_zeta(s).value - sum), 1e-9) << s;
    }
}

TEST(PrimeZeta, KnownValuesAndDirectSum) {
    EXPECT_NEAR(prime_zeta(2.0).value.real(), 0.4522474200, 1e-9);
    EXPECT_NEAR(prime_zeta(4.0).value.real(), 0.0769931398, 1e-9);
    EXPECT_NEAR(prime_zeta(4.0).value.real(), direct_prime_sum(4.0, false).real(), 1e-12);
    for (Complex s : random_points(27, 20, 2.5, 4.0, 30.0))
        EXPECT_LT(std::abs(prime_zeta(s).value - direct_prime_sum(s, false)), 1e-9) << s;
}

TEST(PrimeZetaDeriv, DirectSumAndRealAxis) {
    EXPECT_NEAR(prime_zeta_deriv(3.0).value.real(), direct_prime_sum(3.0, true).real(), 1e-9);
    EXPECT_LT(std::abs(prime_zeta_deriv(1.7).value.imag()), 1e-10);
    for (Complex s : random_points(28, 20, 2.5, 4.0, 30.0))
        EXPECT_LT(std::abs(prime_zeta_deriv(s).value - direct_prime_sum(s, true)), 2e-9) << s;
}

// log zeta(s) = sum_k P(ks)/k.
TEST(PrimeZeta, EulerProductLogIdentity) {
    for (Complex s : random_points(29, 20, 1.5, 3.0, 20.0)) {
        Complex sum = 0.0;
        for (int k = 1; k < 60; ++k) sum += prime_zeta(static_cast<double>(k) * s).value / static_cast<double>(k);
        EXPECT_LT(std::abs(log_zeta(s).value - sum), 1e-8) << s;
    }
}

TEST(PsiEntire, Values) {
    const auto p2 = psi_entire(2.0);
    EXPECT_LE(std::abs(p2.value.real() - (std::numbers::pi * std::numbers::pi / 12.0 - 1.0)), p2.est_error);
    EXPECT_NEAR(psi_entire(2.0).value.real(), -0.1775329666, 1e-9);
    for (Complex s : random_points(30, 30, 1.5, 4.0, 30.0)) {
        const Complex direct = oracle::zeta_partial(s) / s - 1.0 / (s - 1.0);
        EXPECT_LT(std::abs(psi_entire(s).value - direct), 1e-10) << s;
    }
}

// psi(s) = (gamma0 - 1 - gamma1 w)/(1 + w) + O(w^2), w = s - 1.
TEST(PsiEntire, StieltjesExpansionNearOne) {
    const double g0 = gamma0(), g1 = gamma1();
    EXPECT_NEAR(g0, 0.5772156649, 1e-9);
    EXPECT_NEAR(g1, -0.0728158455, 1e-9);
    for (Complex w : {Complex(1e-3, 0.0), Complex(1e-4, 0.0), Complex(1e-5, 3e-5), Complex(1e-6, -1e-6)}) {
        const Complex expected = (g0 - 1.0 - g1 * w) / (1.0 + w);
        EXPECT_LT(std::abs(psi_entire(1.0 + w).value - expected), 1e-8) << w;
    }
}

TEST(PsiEntire, CancellationSafety) {
    const double limit = gamma0() - 1.0;
    const double v2 = psi_entire(1.01).value.real(), v3 = psi_entire(1.001).value.real(),
                 v4 = psi_entire(1.0001).value.real();
    const double d2 = std::abs(v2 - limit), d3 = std::abs(v3 - limit), d4 = std::abs(v4 - limit);
    EXPECT_GT(d2, d3);
    EXPECT_GT(d3, d4);
    EXPECT_NEAR(d2 / d3, 10.0, 1.0);
    EXPECT_NEAR(d3 / d4, 10.0, 1.0);
    EXPECT_NEAR(v4, -0.4227843351, 1e-4);
}

TEST(PsiPrimePart, ValuesAndBoundedness) {
    EXPECT_NEAR(psi_prime_part(2.0).value.real(), 0.2261237100, 1e-9);
    std::vector<double> maxima;
    for (double eps : {0.1, 0.05, 0.01}) {
        double m = 0.0;
        for (double t = -20.0; t <= 20.0; t += 0.25) m = std::max(m, std::abs(psi_prime_part(Complex(1.0 + eps, t)).value));
        maxima.push_back(m);
    }
    const auto [lo, hi] = std::minmax_element(maxima.begin(), maxima.end());
    EXPECT_LT((*hi - *lo) / *lo, 0.2);
}

TEST(Mobius, SmallValues) {
    const int expected[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
    for (unsigned k = 1; k <= 12; ++k) EXPECT_EQ(mobius(k), expected[k - 1]) << k;
    EXPECT_THROW(mobius(0), Error);
}
