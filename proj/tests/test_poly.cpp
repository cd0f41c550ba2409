#include <gtest/gtest.h>

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "minimax/poly.hpp"
#include "minimax/theory.hpp"

using namespace minimax;
using poly::cplx;

namespace {

// Eigenvalues of the companion matrix of z^n + c[n-1] z^(n-1) + ... + c[0].
std::vector<cplx> companion_roots(const std::vector<double>& c) {
    const auto n = static_cast<Eigen::Index>(c.size());
    Mat M = Mat::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) M(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) M(i, n - 1) = -c[static_cast<std::size_t>(i)];
    const auto ev = Eigen::EigenSolver<Mat>(M, false).eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

// Every root in `a` has a partner in `b` within tol.
void expect_same_roots(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (const auto& z : a) {
        double best = 1e300;
        for (const auto& w : b) best = std::min(best, std::abs(z - w));
        EXPECT_LE(best, tol) << "root " << z;
    }
}

}  // namespace

TEST(CubicRoots, MatchCompanionMatrix) {
    Rng r(1);
    for (int t = 0; t < 500; ++t) {
        const double a2 = r.uniform(-3, 3), a1 = r.uniform(-3, 3), a0 = r.uniform(-3, 3);
        const auto ours = poly::cubic_roots(a2, a1, a0);
        expect_same_roots({ours.begin(), ours.end()}, companion_roots({a0, a1, a2}), 1e-7);
    }
}

TEST(CubicRoots, TripleRootAtOne) {
    // (z - 1)^3
    const auto r = poly::cubic_roots(-3.0, 3.0, -1.0);
    for (const auto& z : r) EXPECT_NEAR(std::abs(z - 1.0), 0.0, 1e-5);
}

TEST(CubicRoots, ZeroPolynomialHasTripleZero) {
    const auto r = poly::cubic_roots(0.0, 0.0, 0.0);
    EXPECT_EQ(poly::max_modulus(r), 0.0);
}

TEST(CubicRoots, ThreeDistinctRealRoots) {
    // (z - 1)(z + 2)(z - 0.5) = z^3 + 0.5 z^2 - 2.5 z + 1
    auto r = poly::cubic_roots(0.5, -2.5, 1.0);
    std::vector<double> re;
    for (const auto& z : r) {
        EXPECT_NEAR(z.imag(), 0.0, 1e-14);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -2.0, 1e-14);
    EXPECT_NEAR(re[1], 0.5, 1e-14);
    EXPECT_NEAR(re[2], 1.0, 1e-14);
}

TEST(QuarticRoots, MatchCompanionMatrix) {
    Rng r(2);
    for (int t = 0; t < 500; ++t) {
        const double a3 = r.uniform(-4, 4), a2 = r.uniform(-6, 6), a1 = r.uniform(-4, 4), a0 = r.uniform(-2, 2);
        expect_same_roots(poly::quartic_roots(a3, a2, a1, a0), companion_roots({a0, a1, a2, a3}), 1e-6);
    }
}

TEST(QuarticRoots, FourthRootsOfOnePointTwo) {
    const auto r = poly::quartic_roots(0.0, 0.0, 0.0, -1.2);
    for (const auto& z : r) EXPECT_NEAR(std::abs(z), std::pow(1.2, 0.25), 1e-14);
}

TEST(SchurCubic, SpecExamples) {
    EXPECT_TRUE(theory::schur_cubic(0.0, 0.0, 0.0));
    EXPECT_FALSE(theory::schur_cubic(0.0, 0.0, -1.1));
    EXPECT_NEAR(poly::max_modulus(poly::cubic_roots(0.0, 0.0, -1.1)), std::cbrt(1.1), 1e-14);
}

TEST(SchurCubic, AlexBilinearBoundaryAtGammaDelta1_5) {
    // cubic coefficients of lambda (lambda-1)^2 + phi (g(lambda-1)+1)(d(lambda-1)+1) at g = d = 1.5
    const auto coeffs = [](double phi) {
        return std::array<double, 3>{phi * 2.25 - 2.0, 1.0 - phi * (4.5 - 3.0), phi * 0.25};
    };
    const auto in = coeffs(0.99), out = coeffs(1.01);
    EXPECT_NEAR(in[0], 0.2275, 1e-15);
    EXPECT_NEAR(in[1], -0.485, 1e-15);
    EXPECT_NEAR(in[2], 0.2475, 1e-15);
    EXPECT_NEAR(out[0], 0.2725, 1e-15);
    EXPECT_NEAR(out[1], -0.515, 1e-15);
    EXPECT_NEAR(out[2], 0.2525, 1e-15);
    EXPECT_TRUE(theory::schur_cubic(in[0], in[1], in[2]));
    EXPECT_FALSE(theory::schur_cubic(out[0], out[1], out[2]));
}

TEST(SchurQuartic, SpecExamples) {
    EXPECT_TRUE(theory::schur_quartic(0.0, 0.0, 0.0, 0.0));
    EXPECT_FALSE(theory::schur_quartic(0.0, 0.0, 0.0, -1.2));
    // OGD quartic with a = b = 0.1, kappa_xy = 1: x^4 - 1.6 x^3 + 0.48 x^2 + 0.12 x + 0.02
    EXPECT_TRUE(theory::schur_quartic(-1.6, 0.48, 0.12, 0.02));
    EXPECT_LT(poly::max_modulus(companion_roots({0.02, 0.12, 0.48, -1.6})), 1.0);
}

TEST(SchurTests, AgreeWithCompanionOracleAwayFromBoundary) {
    Rng r(3);
    int checked = 0;
    for (int t = 0; t < 3000; ++t) {
        const double a2 = r.uniform(-3, 3), a1 = r.uniform(-3, 3), a0 = r.uniform(-1.5, 1.5);
        const double m = poly::max_modulus(companion_roots({a0, a1, a2}));
        if (std::abs(m - 1.0) < 1e-6) continue;
        EXPECT_EQ(theory::schur_cubic(a2, a1, a0), m < 1.0);
        const double b3 = r.uniform(-4, 4), b2 = r.uniform(-6, 6), b1 = r.uniform(-4, 4), b0 = r.uniform(-1.5, 1.5);
        const double mq = poly::max_modulus(companion_roots({b0, b1, b2, b3}));
        if (std::abs(mq - 1.0) < 1e-6) continue;
        EXPECT_EQ(theory::schur_quartic(b3, b2, b1, b0), mq < 1.0);
        ++checked;
    }
    EXPECT_GT(checked, 2900);
}
