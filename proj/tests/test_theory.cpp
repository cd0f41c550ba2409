#include <gtest/gtest.h>

#include "minimax/spectral.hpp"
#include "minimax/theory.hpp"

using namespace minimax;
using namespace minimax::theory;

TEST(SimPrescription, PerfectlyConditionedDecoupled) {
    const auto p = sim_prescription({1.0, 1.0, 1.0, 1.0, 0.0});
    EXPECT_NEAR(p.r, 0.0, 1e-15);
    EXPECT_NEAR(p.alpha, 1.0, 1e-15);
}

TEST(SimPrescription, UnitConstants) {
    const auto p = sim_prescription({1.0, 1.0, 1.0, 1.0, 1.0});
    EXPECT_NEAR(p.alpha, 0.5, 1e-15);
    EXPECT_NEAR(p.beta, 0.5, 1e-15);
    EXPECT_NEAR(p.r, 0.5, 1e-15);
    EXPECT_NEAR(p.A, 2.0, 1e-14);
}

TEST(SimPrescription, InverseGapClosedForm) {
    const ProblemParams prm{0.1, 0.3, 2.0, 1.5, 4.0};
    const auto p = sim_prescription(prm);
    const double k = std::max(prm.kappa_x(), prm.kappa_y()), kxy = prm.kappa_xy();
    const double xi = kxy + std::sqrt(k + kxy * kxy);
    EXPECT_NEAR(1.0 / (1.0 - p.r), 0.25 * std::pow(xi + 1.0 / xi, 2), 1e-9 / (1.0 - p.r));
}

TEST(AltPrescription, UnitConstants) {
    const auto p = alt_prescription({1.0, 1.0, 1.0, 1.0, 1.0});
    EXPECT_NEAR(p.alpha, 0.5, 1e-15);
    EXPECT_NEAR(p.beta, 0.5, 1e-15);
    EXPECT_NEAR(p.r, 2.0 / 3.0, 1e-15);
}

TEST(AltPrescription, ValidityConstantPositiveAndSaturatesAtKappaOne) {
    const auto p = alt_prescription({0.1, 0.2, 1.0, 2.0, 3.0});
    EXPECT_GT(p.A, 0.0);
    EXPECT_LT(p.r, 1.0);
    EXPECT_LT(p.complexity(1.0, 1e-8), 100000000u);
    // kappa_x = 1 puts alpha at 1/(2 L_x) so 1/(2 alpha) - mu_x = 0
    const auto q = alt_prescription({1.0, 1.0, 1.0, 1.0, 0.1});
    EXPECT_NEAR(q.A, 0.0, 1e-15);
    EXPECT_EQ(q.complexity(1.0, 1e-8), std::numeric_limits<std::uint64_t>::max());
}

TEST(AlexConstants, GammaDeltaTwo) {
    const auto c = alex_constants(2.0, 2.0);
    EXPECT_DOUBLE_EQ(c.C1, 0.125);
    EXPECT_DOUBLE_EQ(c.C2, 0.125);
    EXPECT_DOUBLE_EQ(c.C3, 0.25);
    EXPECT_DOUBLE_EQ(c.C4, 0.25);
    EXPECT_DOUBLE_EQ(c.C(), 0.125);
}

TEST(AlexConstants, LimitAndErrors) {
    EXPECT_LT(alex_constants(1.0 + 1e-9, 2.0).C1, 1e-9);
    EXPECT_THROW(alex_constants(1.0, 2.0), domain_error);
    EXPECT_THROW(alex_constants(2.0, 0.5), domain_error);
}

TEST(AlexConstants, SatisfyDefiningBounds) {
    for (double g = 1.1; g < 5.0; g += 0.3) {
        for (double d = 1.1; d < 5.0; d += 0.3) {
            const auto c = alex_constants(g, d);
            EXPECT_LE(c.C1, (g - 1) / (2 * g * g) * (1 + 1e-15));
            EXPECT_LE(c.C2, (d - 1) / (2 * d * d) * (1 + 1e-15));
            EXPECT_LE(c.C3, 1 / (3 * g - 2) * (1 + 1e-15));
            EXPECT_LE(c.C4, 1 / (3 * d - 2) * (1 + 1e-15));
            EXPECT_LE(c.C3 * (g - 1), (d - 1) / (2 * d) * (1 + 1e-15));
            EXPECT_LE(c.C4 * (d - 1), (g - 1) / (2 * g) * (1 + 1e-15));
            EXPECT_GT(c.C(), 0.0);
        }
    }
}

TEST(AlexPrescription, UnitConstants) {
    const auto p = alex_prescription({1.0, 1.0, 1.0, 1.0, 1.0}, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(p.alpha, 0.125);
    EXPECT_DOUBLE_EQ(p.beta, 0.125);
    EXPECT_DOUBLE_EQ(p.r, 0.875);
    EXPECT_DOUBLE_EQ(p.A, 4.0);
}

TEST(AlexPrescription, InverseGapIsMaxOfInverseSteps) {
    const ProblemParams prm{0.05, 0.2, 1.0, 3.0, 2.0};
    const auto p = alex_prescription(prm, 1.5, 3.0);
    EXPECT_NEAR(1.0 / (1.0 - p.r), std::max(1.0 / (p.alpha * prm.mu_x), 1.0 / (p.beta * prm.mu_y)), 1e-6);
    EXPECT_GT(p.r, 0.0);
    EXPECT_LT(p.r, 1.0);
}

TEST(Complexity, MatchesFormula) {
    RatePrescription p;
    p.r = 0.5;
    p.A = 2.0;
    // ln(1 / (2e-8)) / ln 2 = 25.58
    EXPECT_EQ(p.complexity(1.0, 1e-8), 26u);
    EXPECT_EQ(p.complexity(1e-9, 1e-8), 0u);
    EXPECT_THROW(p.complexity(1.0, 0.0), domain_error);
}

TEST(StepRegion, Examples) {
    EXPECT_FALSE(bilinear_step_region(1.0, 1.0).convergent);
    EXPECT_FALSE(bilinear_step_region(0.5, 1.5).convergent);
    const auto a = bilinear_step_region(1.5, 1.5);
    EXPECT_TRUE(a.convergent);
    EXPECT_DOUBLE_EQ(a.bound, 1.0);
    const auto b = bilinear_step_region(3.0, 0.5);
    EXPECT_TRUE(b.convergent);
    EXPECT_DOUBLE_EQ(b.bound, 0.6);
}

TEST(StepRegion, BoundMatchesCubicStabilityBoundary) {
    // bisect the first unstable alpha*beta for the cubic and compare with the bound
    for (auto [g, d] : {std::pair{1.5, 1.5}, std::pair{3.0, 0.5}, std::pair{2.0, 1.2}, std::pair{4.0, 3.0},
                        std::pair{1.05, 1.2}}) {
        const auto reg = bilinear_step_region(g, d);
        ASSERT_TRUE(reg.convergent);
        double lo = 1e-6, hi = 2.0 * reg.bound;
        const auto stable = [&](double phi) {
            return poly::max_modulus(spectral::alex_bilinear_cubic(phi, g, d).roots) < 1.0;
        };
        ASSERT_TRUE(stable(lo));
        ASSERT_FALSE(stable(hi));
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (stable(mid) ? lo : hi) = mid;
        }
        EXPECT_NEAR(lo, reg.bound, 1e-6 * reg.bound) << g << ' ' << d;
    }
}

TEST(BilinearCgd, Examples) {
    EXPECT_DOUBLE_EQ(bilinear_cgd(2.0, 2.0), 16.0);
    const double g = 1.7;
    const double t = 2 * g * g - 2 * g;
    EXPECT_DOUBLE_EQ(bilinear_cgd(g, g), std::max((2 * g - 1) * (2 * g - 1) / 2, 2 * t * t / (2 * g - 2)));
    EXPECT_THROW(bilinear_cgd(1.0, 1.0), domain_error);
    EXPECT_THROW(bilinear_cgd(0.5, 3.0), domain_error);
}

TEST(BilinearCgd, PrescribedProductInsideRegion) {
    for (double g = 1.0; g <= 5.0; g += 0.1) {
        for (double d = 1.0; d <= 5.0; d += 0.1) {
            if (g + d <= 2.0 + 1e-9) continue;
            const auto reg = bilinear_step_region(g, d);
            ASSERT_TRUE(reg.convergent);
            EXPECT_LT(1.0 / bilinear_cgd(g, d), reg.bound) << g << ' ' << d;
        }
    }
}

TEST(OptimalDelta1, Examples) {
    const auto t = bilinear_optimal_delta1(2.0, 1.0);
    EXPECT_NEAR(t.alpha_beta, 0.1, 1e-15);
    EXPECT_NEAR(t.gamma, 5.0, 1e-15);
    EXPECT_NEAR(t.rate, std::sqrt(0.6), 1e-15);
    EXPECT_EQ(bilinear_optimal_delta1(1.0, 1.0).rate, 0.0);
    EXPECT_EQ(spectral::delta1_radius(1.0, 2.0, 1.0), 0.0);
    EXPECT_THROW(bilinear_optimal_delta1(1.0, 2.0), domain_error);
    EXPECT_THROW(bilinear_optimal_delta1(1.0, 0.0), domain_error);
}

TEST(OptimalDelta1, RateIsBestOverGridOfGammaAndProduct) {
    const double L = 3.0, mu = 1.0;
    const auto t = bilinear_optimal_delta1(L, mu);
    const auto rho = [&](double ab, double g) {
        double r = 0.0;
        for (double s = mu; s <= L + 1e-12; s += (L - mu) / 200) r = std::max(r, spectral::delta1_radius(ab, g, s));
        return r;
    };
    EXPECT_NEAR(rho(t.alpha_beta, t.gamma), t.rate, 1e-9);
    for (double ab = 0.005; ab < 0.5; ab *= 1.1)
        for (double g = 1.5; g < 20.0; g *= 1.1) EXPECT_GE(rho(ab, g), t.rate - 1e-9);
}

TEST(Prescriptions, RatesInUnitIntervalOverParamGrid) {
    for (double mu : {0.01, 0.1, 1.0})
        for (double L : {1.0, 3.0})
            for (double Lxy : {0.0, 0.5, 5.0}) {
                if (mu > L) continue;
                const ProblemParams p{mu, 2 * mu > L ? mu : 2 * mu, L, L, Lxy};
                for (const auto& rp : {sim_prescription(p), alt_prescription(p), alex_prescription(p, 2.0, 1.5)}) {
                    EXPECT_GE(rp.r, 0.0) << rp.algo;
                    EXPECT_LT(rp.r, 1.0) << rp.algo;
                    EXPECT_GT(rp.alpha, 0.0);
                    EXPECT_GT(rp.beta, 0.0);
                }
            }
}
