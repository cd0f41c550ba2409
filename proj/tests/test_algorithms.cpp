#include <gtest/gtest.h>

#include "minimax/algorithms.hpp"
#include "minimax/run.hpp"
#include "minimax/theory.hpp"

using namespace minimax;

namespace {

Mat m1(double v) { return Mat::Constant(1, 1, v); }
Vec v1(double v) { return Vec::Constant(1, v); }

AlgorithmConfig cfg_of(Algo a, double alpha, double beta) {
    AlgorithmConfig c;
    c.algo = a;
    c.alpha = alpha;
    c.beta = beta;
    return c;
}

AlgorithmConfig alex_of(double alpha, double beta, double gamma, double delta) {
    auto c = cfg_of(Algo::AlexGDA, alpha, beta);
    c.gamma = gamma;
    c.delta = delta;
    return c;
}

QuadraticGame random_game(std::uint64_t seed) {
    return random_quadratic(4, 3, {0.3, 0.5, 1.0, 1.5, 1.2}, 0.2, seed);
}

JointPoint random_point(Eigen::Index dx, Eigen::Index dy, std::uint64_t seed) {
    Rng r(seed);
    JointPoint z;
    z.x = r.normal_vec(dx);
    z.y = r.normal_vec(dy);
    return z;
}

template <class P>
std::vector<JointPoint> trajectory(const P& g, const AlgorithmConfig& c, const JointPoint& z0, int k) {
    std::vector<JointPoint> out;
    auto s = init_state(g, z0);
    Workspace w(g);
    for (int i = 0; i < k; ++i) {
        advance(g, c, s, w);
        out.push_back(s.current);
    }
    return out;
}

}  // namespace

TEST(StepSim, BilinearByHand) {
    const BilinearGame g(m1(1.0));
    const auto s = step_sim(init_state(g, {v1(1.0), v1(0.0)}), g, cfg_of(Algo::SimGDA, 0.1, 0.1));
    EXPECT_DOUBLE_EQ(s.current.x[0], 1.0);
    EXPECT_DOUBLE_EQ(s.current.y[0], 0.1);
    EXPECT_EQ(s.grad_calls, 2u);
    // second step: x = 1 - 0.1*0.1, y = 0.1 + 0.1*1
    const auto s2 = step_sim(s, g, cfg_of(Algo::SimGDA, 0.1, 0.1));
    EXPECT_DOUBLE_EQ(s2.current.x[0], 0.99);
    EXPECT_DOUBLE_EQ(s2.current.y[0], 0.2);
}

TEST(StepAlt, BilinearByHand) {
    const BilinearGame g(m1(1.0));
    const auto c = cfg_of(Algo::AltGDA, 0.1, 0.1);
    const auto s = step_alt(init_state(g, {v1(1.0), v1(0.0)}), g, c);
    EXPECT_DOUBLE_EQ(s.current.x[0], 1.0);
    EXPECT_DOUBLE_EQ(s.current.y[0], 0.1);
    // x = 0.99, then y = 0.1 + 0.1*0.99
    const auto s2 = step_alt(s, g, c);
    EXPECT_DOUBLE_EQ(s2.current.x[0], 0.99);
    EXPECT_DOUBLE_EQ(s2.current.y[0], 0.199);
    const auto sim2 = step_sim(step_sim(init_state(g, {v1(1.0), v1(0.0)}), g, c), g, c);
    EXPECT_NE(sim2.current.y[0], s2.current.y[0]);
}

TEST(StepAlt, QuadraticEqualsProductOfTriangularMaps) {
    const auto g = random_game(1);
    const double a = 0.3, b = 0.4;
    const auto dx = g.dx(), dy = g.dy();
    Mat X = Mat::Identity(dx + dy, dx + dy), Y = Mat::Identity(dx + dy, dx + dy);
    X.topLeftCorner(dx, dx) -= a * g.A();
    X.topRightCorner(dx, dy) = -a * g.B();
    Y.bottomLeftCorner(dy, dx) = b * g.B().transpose();
    Y.bottomRightCorner(dy, dy) -= b * g.C();
    const auto z = random_point(dx, dy, 2);
    Vec s(dx + dy);
    s << z.x, z.y;
    const Vec expect = Y * X * s;
    const auto n = step_alt(init_state(g, z), g, cfg_of(Algo::AltGDA, a, b));
    EXPECT_LE((n.current.x - expect.head(dx)).norm(), 1e-13);
    EXPECT_LE((n.current.y - expect.tail(dy)).norm(), 1e-13);
}

TEST(StepAlex, OneOneIsAltBitwise) {
    const auto g = random_game(3);
    const auto z0 = random_point(4, 3, 4);
    const auto alt = trajectory(g, cfg_of(Algo::AltGDA, 0.3, 0.2), z0, 200);
    const auto alex = trajectory(g, alex_of(0.3, 0.2, 1.0, 1.0), z0, 200);
    for (std::size_t k = 0; k < alt.size(); ++k) {
        ASSERT_EQ(alt[k].x, alex[k].x) << k;
        ASSERT_EQ(alt[k].y, alex[k].y) << k;
    }
}

TEST(StepAlex, ZeroOneIsSimBitwise) {
    const auto g = random_game(5);
    const auto z0 = random_point(4, 3, 6);
    const auto sim = trajectory(g, cfg_of(Algo::SimGDA, 0.3, 0.2), z0, 200);
    const auto alex = trajectory(g, alex_of(0.3, 0.2, 0.0, 1.0), z0, 200);
    for (std::size_t k = 0; k < sim.size(); ++k) {
        ASSERT_EQ(sim[k].x, alex[k].x) << k;
        ASSERT_EQ(sim[k].y, alex[k].y) << k;
    }
}

TEST(StepAlex, BilinearByHand) {
    // B = 1, alpha = beta = 0.5, gamma = delta = 2, start (1, 1), tilde_y = 1
    const BilinearGame g(m1(1.0));
    const auto s = step_alex(init_state(g, {v1(1.0), v1(1.0)}), g, alex_of(0.5, 0.5, 2.0, 2.0));
    // gx = 1: tilde_x = 0, x = 0.5; gy = tilde_x = 0: tilde_y = 1, y = 1
    EXPECT_DOUBLE_EQ(s.tilde_x[0], 0.0);
    EXPECT_DOUBLE_EQ(s.current.x[0], 0.5);
    EXPECT_DOUBLE_EQ(s.tilde_y[0], 1.0);
    EXPECT_DOUBLE_EQ(s.current.y[0], 1.0);
    EXPECT_EQ(s.grad_calls, 2u);
    // gx = 1: tilde_x = -0.5, x = 0; gy = -0.5: tilde_y = 0.5, y = 0.75
    const auto s2 = step_alex(s, g, alex_of(0.5, 0.5, 2.0, 2.0));
    EXPECT_DOUBLE_EQ(s2.tilde_x[0], -0.5);
    EXPECT_DOUBLE_EQ(s2.current.x[0], 0.0);
    EXPECT_DOUBLE_EQ(s2.tilde_y[0], 0.5);
    EXPECT_DOUBLE_EQ(s2.current.y[0], 0.75);
}

TEST(StepEg, ZeroSecondStepIsIdentity) {
    const auto g = random_game(7);
    const auto z0 = random_point(4, 3, 8);
    auto c = cfg_of(Algo::EG, 0.3, 0.2);
    c.alpha1 = 0.0;
    c.beta1 = 0.0;
    const auto s = step_eg(init_state(g, z0), g, c);
    EXPECT_EQ(s.current.x, z0.x);
    EXPECT_EQ(s.current.y, z0.y);
    EXPECT_EQ(s.grad_calls, 4u);
}

TEST(StepEg, BilinearByHand) {
    // B = 1, step 0.5, from (1, 0): half point (1, 0.5), gradients (0.5, 1), next (0.75, 0.5)
    const BilinearGame g(m1(1.0));
    const auto s = step_eg(init_state(g, {v1(1.0), v1(0.0)}), g, cfg_of(Algo::EG, 0.5, 0.5));
    EXPECT_DOUBLE_EQ(s.current.x[0], 0.75);
    EXPECT_DOUBLE_EQ(s.current.y[0], 0.5);
}

TEST(StepOgd, ZeroMemoryIsSim) {
    const auto g = random_game(9);
    const auto z0 = random_point(4, 3, 10);
    auto c = cfg_of(Algo::OGD, 0.3, 0.2);
    c.alpha1 = 0.0;
    c.beta1 = 0.0;
    const auto ogd = trajectory(g, c, z0, 50);
    const auto sim = trajectory(g, cfg_of(Algo::SimGDA, 0.3, 0.2), z0, 50);
    for (std::size_t k = 0; k < sim.size(); ++k) {
        ASSERT_EQ(sim[k].x, ogd[k].x);
        ASSERT_EQ(sim[k].y, ogd[k].y);
    }
}

TEST(StepOgd, CanonicalFormMatchesTwoStepRecurrence) {
    // x_{k+1} = x_k - 2a g(z_k) + a g(z_{k-1}) with a zero gradient before step 0
    const auto g = random_game(11);
    const auto z0 = random_point(4, 3, 12);
    const double a = 0.1;
    auto c = cfg_of(Algo::OGD, 2 * a, 2 * a);
    const auto traj = trajectory(g, c, z0, 30);
    JointPoint prev = z0, cur = z0;
    Vec pgx = Vec::Zero(4), pgy = Vec::Zero(3);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Vec gx = g.A() * cur.x + g.B() * cur.y;
        const Vec gy = g.B().transpose() * cur.x - g.C() * cur.y;
        JointPoint nxt{cur.x - 2 * a * gx + a * pgx, cur.y + 2 * a * gy - a * pgy};
        pgx = gx;
        pgy = gy;
        prev = cur;
        cur = nxt;
        EXPECT_LE((traj[k].x - cur.x).norm() + (traj[k].y - cur.y).norm(), 1e-13);
    }
}

TEST(StepOgd, WorstCaseCoordinatesFollowFourByFourRecurrence) {
    const ProblemParams p{0.5, 0.4, 1.0, 1.0, 0.8};
    const auto g = worst_case_6d(p);
    const double a = 0.2, b = 0.3;
    auto c = cfg_of(Algo::OGD, 2 * a, 2 * b);
    JointPoint z0{Vec::Ones(3), Vec::Ones(3)};
    const auto traj = trajectory(g, c, z0, 20);
    // state (x_k, y_k, x_{k-1}, y_{k-1}) on the coupled pair
    Mat P(4, 4);
    const double L = p.L_xy;
    P << 1 - 2 * a * p.mu_x, -2 * a * L, a * p.mu_x, a * L,  //
        2 * b * L, 1 - 2 * b * p.mu_y, -b * L, b * p.mu_y,   //
        1, 0, 0, 0,                                          //
        0, 1, 0, 0;
    // step 0 is a plain simultaneous step
    Vec s(4);
    s << 1 - 2 * a * (p.mu_x + L), 1 + 2 * b * (L - p.mu_y), 1, 1;
    EXPECT_NEAR(traj[0].x[0], s[0], 1e-15);
    EXPECT_NEAR(traj[0].y[0], s[1], 1e-15);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        s = P * s;
        EXPECT_NEAR(traj[k].x[0], s[0], 1e-13);
        EXPECT_NEAR(traj[k].y[0], s[1], 1e-13);
    }
}

TEST(StepMomentum, ZeroMomentumEqualsBase) {
    const auto g = random_game(13);
    const auto z0 = random_point(4, 3, 14);
    const std::pair<Algo, Algo> pairs[] = {
        {Algo::SimGDA, Algo::SimGDA_M}, {Algo::AltGDA, Algo::AltGDA_M}, {Algo::AlexGDA, Algo::AlexGDA_M}};
    for (const auto& [base, mom] : pairs) {
        auto cb = cfg_of(base, 0.3, 0.2);
        auto cm = cfg_of(mom, 0.3, 0.2);
        cb.gamma = cm.gamma = 1.7;
        cb.delta = cm.delta = 1.3;
        const auto tb = trajectory(g, cb, z0, 50);
        const auto tm = trajectory(g, cm, z0, 50);
        for (std::size_t k = 0; k < tb.size(); ++k) {
            ASSERT_EQ(tb[k].x, tm[k].x) << to_string(mom);
            ASSERT_EQ(tb[k].y, tm[k].y) << to_string(mom);
        }
    }
}

TEST(StepMomentum, AlexFirstStepEqualsPlainAlex) {
    const auto g = random_game(15);
    const auto z0 = random_point(4, 3, 16);
    auto cm = alex_of(0.3, 0.2, 2.0, 1.5);
    cm.algo = Algo::AlexGDA_M;
    cm.m_x = 0.5;
    cm.m_y = -0.3;
    const auto a = step_momentum(init_state(g, z0), g, cm);
    const auto b = step_alex(init_state(g, z0), g, alex_of(0.3, 0.2, 2.0, 1.5));
    EXPECT_EQ(a.current.x, b.current.x);
    EXPECT_EQ(a.current.y, b.current.y);
}

TEST(StepMomentum, TwoStepUnrollOnBilinear) {
    // Sim momentum on xy, alpha = beta = 0.1, m = 0.5, from (1, 1)
    const BilinearGame g(m1(1.0));
    auto c = cfg_of(Algo::SimGDA_M, 0.1, 0.1);
    c.m_x = c.m_y = 0.5;
    const auto s1 = step_momentum(init_state(g, {v1(1.0), v1(1.0)}), g, c);
    // g1 = (1, 1): x1 = 0.9, y1 = 1.1
    EXPECT_DOUBLE_EQ(s1.current.x[0], 0.9);
    EXPECT_DOUBLE_EQ(s1.current.y[0], 1.1);
    const auto s2 = step_momentum(s1, g, c);
    // g2 = (1.1, 0.9); v2 = 0.5 g1 + g2 = (1.6, 1.4)
    EXPECT_DOUBLE_EQ(s2.velocity_x[0], 1.6);
    EXPECT_DOUBLE_EQ(s2.velocity_y[0], 1.4);
    EXPECT_DOUBLE_EQ(s2.current.x[0], 0.9 - 0.16);
    EXPECT_DOUBLE_EQ(s2.current.y[0], 1.1 + 0.14);
    EXPECT_THROW(step_momentum(s1, g, cfg_of(Algo::SimGDA, 0.1, 0.1)), domain_error);
}

TEST(StepSim, WorstCaseCoordinatesDecouple) {
    const ProblemParams p{0.5, 0.4, 1.0, 1.2, 0.8};
    const auto g = worst_case_6d(p);
    const double a = 0.3, b = 0.2;
    JointPoint z0{Vec::Ones(3), Vec::Ones(3)};
    const auto traj = trajectory(g, cfg_of(Algo::SimGDA, a, b), z0, 40);
    double s = 1, t = 1, u = 1, v = 1, w = 1, q = 1;
    for (const auto& z : traj) {
        const double s1 = (1 - a * p.mu_x) * s - a * p.L_xy * t;
        const double t1 = b * p.L_xy * s + (1 - b * p.mu_y) * t;
        s = s1;
        t = t1;
        u *= 1 - a * p.mu_x;
        v *= 1 - b * p.mu_y;
        w *= 1 - a * p.L_x;
        q *= 1 - b * p.L_y;
        EXPECT_NEAR(z.x[0], s, 1e-13);
        EXPECT_NEAR(z.y[0], t, 1e-13);
        EXPECT_NEAR(z.x[1], u, 1e-13);
        EXPECT_NEAR(z.y[1], v, 1e-13);
        EXPECT_NEAR(z.x[2], w, 1e-13);
        EXPECT_NEAR(z.y[2], q, 1e-13);
    }
}

class AllAlgos : public ::testing::TestWithParam<Algo> {};

TEST_P(AllAlgos, NashIsFixedPoint) {
    const auto g = random_game(17);
    const auto zs = nash_equilibrium(g);
    auto c = cfg_of(GetParam(), 0.3, 0.2);
    c.m_x = c.m_y = 0.3;
    c.gamma = 2.0;
    const auto s = step(init_state(g, zs), g, c);
    EXPECT_LE((s.current.x - zs.x).norm() + (s.current.y - zs.y).norm(), 1e-15);
}

TEST_P(AllAlgos, GradientCallAccounting) {
    const auto g = random_game(18);
    auto s = init_state(g, random_point(4, 3, 19));
    Workspace w(g);
    auto c = cfg_of(GetParam(), 0.1, 0.1);
    for (int k = 0; k < 37; ++k) advance(g, c, s, w);
    EXPECT_EQ(s.grad_calls, GetParam() == Algo::EG ? 4u * 37u : 2u * 37u);
    EXPECT_EQ(s.iter, 37u);
}

TEST_P(AllAlgos, AffineInStateWhenNashIsOrigin) {
    const auto g = random_game(20);
    auto c = cfg_of(GetParam(), 0.3, 0.2);
    c.m_x = c.m_y = 0.3;
    c.gamma = 1.8;
    const auto za = random_point(4, 3, 21), zb = random_point(4, 3, 22);
    const double a = 0.3;
    const auto n = 5;
    const auto ta = trajectory(g, c, za, n), tb = trajectory(g, c, zb, n);
    const JointPoint zm{a * za.x + (1 - a) * zb.x, a * za.y + (1 - a) * zb.y};
    const auto tm = trajectory(g, c, zm, n);
    for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        EXPECT_LE((tm[i].x - (a * ta[i].x + (1 - a) * tb[i].x)).norm(), 1e-13);
        EXPECT_LE((tm[i].y - (a * ta[i].y + (1 - a) * tb[i].y)).norm(), 1e-13);
    }
}

INSTANTIATE_TEST_SUITE_P(Algos, AllAlgos,
                         ::testing::Values(Algo::SimGDA, Algo::AltGDA, Algo::AlexGDA, Algo::EG, Algo::OGD,
                                           Algo::SimGDA_M, Algo::AltGDA_M, Algo::AlexGDA_M),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Config, ParseAndValidate) {
    EXPECT_EQ(parse_algo("alex"), Algo::AlexGDA);
    EXPECT_FALSE(parse_algo("adam").has_value());
    auto c = cfg_of(Algo::SimGDA, -0.1, 0.1);
    EXPECT_THROW(c.validate(), domain_error);
    c = cfg_of(Algo::EG, 0.2, 0.4);
    EXPECT_EQ(c.alpha_1(), 0.2);
    c.algo = Algo::OGD;
    EXPECT_EQ(c.alpha_1(), 0.1);
    EXPECT_EQ(c.beta_1(), 0.2);
}

TEST(Run, SimOnBilinearDoesNotConverge) {
    const BilinearGame g(m1(1.0));
    for (double a : {0.01, 0.1, 1.0, 3.0}) {
        const auto res = run(g, cfg_of(Algo::SimGDA, a, a), {v1(1.0), v1(1.0)}, 1e-8, 20000);
        EXPECT_FALSE(res.converged) << a;
        EXPECT_GT(res.final_dist_sq, 2.0) << a;
    }
    const auto big = run(g, cfg_of(Algo::SimGDA, 3.0, 3.0), {v1(1.0), v1(1.0)}, 1e-8, 20000);
    EXPECT_TRUE(big.diverged);
    EXPECT_TRUE(std::isinf(big.trace.back().dist_sq));
}

TEST(Run, AlexOptimalDelta1RateOnBilinear) {
    Mat B = Mat::Zero(2, 2);
    B.diagonal() << 2.0, 1.0;
    const BilinearGame g(B);
    const auto t = theory::bilinear_optimal_delta1(2.0, 1.0);
    EXPECT_NEAR(t.gamma, 5.0, 1e-15);
    const double s = std::sqrt(t.alpha_beta);
    RunOptions opt;
    opt.eps = 1e-200;
    opt.max_iters = 600;
    const auto res = run(g, alex_of(s, s, t.gamma, 1.0), {Vec::Ones(2), Vec::Ones(2)}, opt);
    ASSERT_FALSE(res.diverged);
    // the per-step contraction of ||z|| is bounded by the rate up to polynomial factors
    const double emp = std::pow(res.trace.back().dist_sq / res.trace.front().dist_sq, 0.5 / 600.0);
    EXPECT_NEAR(emp, t.rate, 0.01);
    EXPECT_LT(emp, 1.0);
}

TEST(Run, StartAtNashGivesSingleRecord) {
    const auto g = random_game(23);
    const auto res = run(g, cfg_of(Algo::AltGDA, 0.1, 0.1), nash_equilibrium(g), 1e-12, 100);
    ASSERT_EQ(res.trace.size(), 1u);
    EXPECT_EQ(res.trace[0].dist_sq, 0.0);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 0u);
}

TEST(Run, MaxItersReportsNotConverged) {
    const auto g = random_game(24);
    const auto res = run(g, cfg_of(Algo::AltGDA, 0.1, 0.1), random_point(4, 3, 25), 1e-30, 10);
    EXPECT_FALSE(res.converged);
    EXPECT_FALSE(res.diverged);
    EXPECT_EQ(res.iterations, 10u);
    EXPECT_EQ(res.trace.size(), 11u);
    EXPECT_EQ(res.grad_calls, 20u);
    EXPECT_THROW(run(g, cfg_of(Algo::AltGDA, 0.1, 0.1), random_point(4, 3, 25), 0.0, 10), domain_error);
}

TEST(Run, DeterministicTrace) {
    const auto g = random_game(26);
    const auto z0 = random_point(4, 3, 27);
    const auto a = run(g, alex_of(0.2, 0.2, 2.0, 1.5), z0, 1e-12, 5000);
    const auto b = run(g, alex_of(0.2, 0.2, 2.0, 1.5), z0, 1e-12, 5000);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].dist_sq, b.trace[i].dist_sq);
    EXPECT_TRUE(a.converged);
}
