#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "vbarrier/model.hpp"

using namespace vbarrier;

namespace {

// Reference parameter set used throughout: a = 1, theta = 0.04, rho = 0.5,
// sigma1 = sigma2 = 0.3, r0 = 0.05.
VasicekParams reference_params() { return VasicekParams{}; }

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

}  // namespace

TEST(BFactor, VanishesAtMaturity) { EXPECT_EQ(b_factor(1.0, 1.0, 1.0), 0.0); }

TEST(BFactor, ZeroMeanReversionLimitIsTimeToMaturity) {
    EXPECT_NEAR(b_factor(0.0, 1.0, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(b_factor(0.0, 1.0, 1e-9), 1.0, 1e-9);
}

TEST(BFactor, ClosedFormAtUnitRate) {
    EXPECT_NEAR(b_factor(0.0, 1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(b_factor(0.0, 1.0, 1.0), 0.6321206, 1e-7);
}

TEST(BFactor, RejectsValuationAfterMaturity) {
    EXPECT_THROW(b_factor(1.5, 1.0, 1.0), std::domain_error);
}

TEST(BFactor, ContinuousAcrossSeriesBranch) {
    for (double s : {0.1, 1.0, 10.0}) {
        for (double sign : {-1.0, 1.0}) {
            const double below = b_factor(0.0, s, sign * kSmallMeanReversion * (1.0 - 1e-12));
            const double above = b_factor(0.0, s, sign * kSmallMeanReversion * (1.0 + 1e-12));
            EXPECT_LT(rel(below, above), 1e-10) << "s=" << s;
        }
    }
}

TEST(BondPrice, EqualsOneAtMaturity) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-0.2, 0.3);
    for (int i = 0; i < 50; ++i) {
        VasicekParams p;
        p.a = u(gen) * 10.0;
        p.theta = u(gen);
        p.sigma2 = std::abs(u(gen));
        EXPECT_DOUBLE_EQ(bond_price(u(gen), 2.0, 2.0, p), 1.0);
    }
}

TEST(BondPrice, DeterministicRateReducesToDiscountFactor) {
    VasicekParams p = reference_params();
    p.sigma2 = 0.0;
    p.theta = 0.05;
    EXPECT_LT(rel(bond_price(0.05, 0.0, 1.0, p), std::exp(-0.05)), 1e-12);
    EXPECT_NEAR(bond_price(0.05, 0.0, 1.0, p), 0.9512294, 1e-7);
    for (double t : {0.0, 0.3, 0.9}) {
        EXPECT_LT(rel(bond_price(0.05, t, 1.0, p), std::exp(-0.05 * (1.0 - t))), 1e-12);
    }
}

TEST(BondPrice, MatchesAffineOdeSolution) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> a_dist(-0.5, 4.0);
    std::uniform_real_distribution<double> theta_dist(-0.02, 0.1);
    std::uniform_real_distribution<double> sigma_dist(0.0, 0.4);
    std::uniform_real_distribution<double> r_dist(-0.05, 0.15);
    for (int i = 0; i < 40; ++i) {
        VasicekParams p;
        p.a = a_dist(gen);
        p.theta = theta_dist(gen);
        p.sigma2 = sigma_dist(gen);
        const double r = r_dist(gen);
        for (double s : {0.1, 1.0, 3.0}) {
            const double expected = oracle::vasicek_bond_ode(r, s, p.a, p.theta, p.sigma2);
            EXPECT_NEAR(bond_price(r, 0.0, s, p), expected, 1e-10) << "a=" << p.a << " s=" << s;
        }
    }
}

TEST(BondPrice, PrintedVariantDisagreesWithOde) {
    const VasicekParams p = reference_params();
    const double ode = oracle::vasicek_bond_ode(0.05, 1.0, p.a, p.theta, p.sigma2);
    EXPECT_GT(std::abs(bond_price(0.05, 0.0, 1.0, p, BondFormula::printed_variant) - ode), 1e-3);
}

TEST(BondPrice, StandardFormMatchesTextbookGrouping) {
    // ln A = (B - s)(a^2 theta - sigma^2/2)/a^2 - sigma^2 B^2/(4a)
    const VasicekParams p = reference_params();
    const double s = 1.0;
    const double b = (1.0 - std::exp(-p.a * s)) / p.a;
    const double log_a = (b - s) * (p.a * p.a * p.theta - p.sigma2 * p.sigma2 / 2.0) / (p.a * p.a) -
                         p.sigma2 * p.sigma2 * b * b / (4.0 * p.a);
    EXPECT_LT(rel(bond_price(0.05, 0.0, s, p), std::exp(log_a - 0.05 * b)), 1e-14);
}

TEST(BondPrice, RejectsValuationAfterMaturity) {
    EXPECT_THROW(bond_price(0.05, 2.0, 1.0, reference_params()), std::domain_error);
}

TEST(EffectiveVolSq, EqualsStockVarianceAtMaturity) {
    EXPECT_DOUBLE_EQ(effective_vol_sq(1.0, 1.0, reference_params()), 0.09);
}

TEST(EffectiveVolSq, EqualsStockVarianceWithoutRateVolatility) {
    VasicekParams p = reference_params();
    p.sigma2 = 0.0;
    for (double t : {0.0, 0.5, 0.99}) EXPECT_NEAR(effective_vol_sq(t, 1.0, p), 0.09, 1e-16);
}

TEST(EffectiveVolSq, QuadraticFormAtReferenceParameters) {
    const VasicekParams p = reference_params();
    const double b = 1.0 - std::exp(-1.0);
    const double expected = 0.09 + 2.0 * 0.5 * 0.3 * 0.3 * b + 0.09 * b * b;
    EXPECT_NEAR(effective_vol_sq(0.0, 1.0, p), expected, 1e-15);
}

TEST(EffectiveVolSq, NonNegativeIncludingPerfectCorrelation) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        VasicekParams p;
        p.a = 5.0 * u(gen) - 1.0;
        p.sigma1 = u(gen);
        p.sigma2 = 2.0 * u(gen);
        p.rho = i % 3 == 0 ? -1.0 : (i % 3 == 1 ? 1.0 : 2.0 * u(gen) - 1.0);
        EXPECT_GE(effective_vol_sq(10.0 * u(gen), 10.0, p), 0.0);
    }
}

TEST(IntegratedVariance, ConstantIntegrandWithoutRateVolatility) {
    VasicekParams p = reference_params();
    p.sigma2 = 0.0;
    EXPECT_NEAR(integrated_variance(0.0, 2.0, 2.0, p), 0.18, 1e-15);
}

TEST(IntegratedVariance, MatchesPrintedClosedFormOnFullHorizon) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        VasicekParams p;
        p.a = 0.05 + 3.0 * u(gen);
        p.sigma1 = u(gen);
        p.sigma2 = u(gen);
        p.rho = 2.0 * u(gen) - 1.0;
        const double tau = 0.1 + 5.0 * u(gen);
        const double a = p.a;
        const double s1 = p.sigma1;
        const double s2 = p.sigma2;
        const double expected =
            (s1 * s1 + 2.0 * p.rho * s1 * s2 / a + s2 * s2 / (a * a)) * tau -
            2.0 * s2 / (a * a) * (p.rho * s1 + s2 / a) * (1.0 - std::exp(-a * tau)) +
            s2 * s2 / (2.0 * a * a * a) * (1.0 - std::exp(-2.0 * a * tau));
        EXPECT_LT(std::abs(integrated_variance(0.0, tau, tau, p) - expected), 1e-12 * expected + 1e-15);
    }
}

TEST(IntegratedVariance, ReferenceParametersMatchQuadrature) {
    const VasicekParams p = reference_params();
    const double numeric =
        oracle::gauss_kronrod([&](double t) { return effective_vol_sq(t, 1.0, p); }, 0.0, 1.0);
    EXPECT_LT(rel(integrated_variance(0.0, 1.0, 1.0, p), numeric), 1e-10);
}

TEST(IntegratedVariance, RandomDrawsMatchQuadrature) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> a_dist(0.01, 5.0);
    std::uniform_real_distribution<double> sigma_dist(0.0, 1.0);
    std::uniform_real_distribution<double> rho_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> tau_dist(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        VasicekParams p;
        p.a = a_dist(gen);
        p.sigma1 = sigma_dist(gen);
        p.sigma2 = sigma_dist(gen);
        p.rho = rho_dist(gen);
        const double tau = tau_dist(gen);
        const double numeric =
            oracle::gauss_kronrod([&](double t) { return effective_vol_sq(t, tau, p); }, 0.0, tau);
        if (numeric == 0.0) continue;
        EXPECT_LT(rel(integrated_variance(0.0, tau, tau, p), numeric), 1e-10)
            << "a=" << p.a << " tau=" << tau;
    }
}

TEST(IntegratedVariance, SubIntervalsMatchQuadrature) {
    VasicekParams p = reference_params();
    for (double a : {-0.7, 1e-7, 0.03, 2.5}) {
        p.a = a;
        const double numeric =
            oracle::gauss_kronrod([&](double t) { return effective_vol_sq(t, 3.0, p); }, 0.7, 2.2);
        EXPECT_LT(rel(integrated_variance(0.7, 2.2, 3.0, p), numeric), 1e-10) << "a=" << a;
    }
}

TEST(IntegratedVariance, AdditiveOverAdjacentIntervals) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        VasicekParams p;
        p.a = i % 4 == 0 ? 1e-8 * u(gen) : 4.0 * u(gen) - 0.5;
        p.sigma1 = u(gen);
        p.sigma2 = u(gen);
        p.rho = 2.0 * u(gen) - 1.0;
        const double tau = 0.1 + 9.9 * u(gen);
        const double t1 = tau * u(gen);
        const double whole = integrated_variance(0.0, tau, tau, p);
        const double parts = integrated_variance(0.0, t1, tau, p) + integrated_variance(t1, tau, tau, p);
        EXPECT_LE(std::abs(parts - whole), 1e-12 * whole + 1e-300);
    }
    const VasicekParams p = reference_params();
    EXPECT_NEAR(integrated_variance(0.0, 0.4, 1.0, p) + integrated_variance(0.4, 1.0, 1.0, p),
                integrated_variance(0.0, 1.0, 1.0, p), 1e-15);
}

TEST(IntegratedVariance, ZeroMeanReversionLimit) {
    VasicekParams p = reference_params();
    p.a = 0.0;
    const double tau = 2.0;
    // B(t) = tau - t, so the integral is sigma1^2 tau + rho s1 s2 tau^2 + s2^2 tau^3 / 3.
    const double expected = 0.09 * tau + 0.5 * 0.09 * tau * tau + 0.09 * tau * tau * tau / 3.0;
    EXPECT_LT(rel(integrated_variance(0.0, tau, tau, p), expected), 1e-14);
    p.a = 1e-9;
    EXPECT_LT(rel(integrated_variance(0.0, tau, tau, p), expected), 1e-8);
}

TEST(IntegratedVariance, RejectsMisorderedTimes) {
    const VasicekParams p = reference_params();
    EXPECT_THROW(integrated_variance(0.5, 0.4, 1.0, p), std::domain_error);
    EXPECT_THROW(integrated_variance(0.0, 1.5, 1.0, p), std::domain_error);
}

TEST(VasicekParams, ValidationRejectsBadInputs) {
    VasicekParams p;
    p.rho = 1.2;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = VasicekParams{};
    p.sigma2 = -0.1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    EXPECT_NO_THROW(VasicekParams{}.validate());
}
