#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

#include "minimax/algorithms.hpp"
#include "minimax/core.hpp"
#include "minimax/linalg.hpp"
#include "minimax/poly.hpp"
#include "minimax/problems.hpp"
#include "minimax/theory.hpp"

namespace minimax::spectral {

using cplx = std::complex<double>;

struct IterationMatrix {
    Mat M;
    std::string state_layout;
    std::vector<Eigen::Index> block_sizes;
};

struct LinearParts {
    Mat A, B, C;
};

inline LinearParts linear_parts(const QuadraticGame& g) { return {g.A(), g.B(), g.C()}; }
inline LinearParts linear_parts(const BilinearGame& g) {
    return {Mat::Zero(g.dx(), g.dx()), g.B(), Mat::Zero(g.dy(), g.dy())};
}

namespace detail {

// Row/column offsets of consecutive blocks.
struct Blocks {
    std::vector<Eigen::Index> size, off;
    explicit Blocks(std::vector<Eigen::Index> s) : size(std::move(s)), off(size.size() + 1, 0) {
        for (std::size_t i = 0; i < size.size(); ++i) off[i + 1] = off[i] + size[i];
    }
    Eigen::Index total() const { return off.back(); }
    auto blk(Mat& M, std::size_t i, std::size_t j) const {
        return M.block(off[i], off[j], size[i], size[j]);
    }
};

inline Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

inline Mat sim_matrix(const LinearParts& p, double a, double b) {
    const auto dx = p.A.rows(), dy = p.C.rows();
    Blocks bl({dx, dy});
    Mat M(bl.total(), bl.total());
    bl.blk(M, 0, 0) = eye(dx) - a * p.A;
    bl.blk(M, 0, 1) = -a * p.B;
    bl.blk(M, 1, 0) = b * p.B.transpose();
    bl.blk(M, 1, 1) = eye(dy) - b * p.C;
    return M;
}

}  // namespace detail

// Exact linear map of one iteration on the stacked state.
template <Objective P>
IterationMatrix build_matrix(const P& problem, const AlgorithmConfig& cfg) {
    using detail::Blocks;
    using detail::eye;
    cfg.validate();
    const LinearParts p = linear_parts(problem);
    const Mat& A = p.A;
    const Mat& B = p.B;
    const Mat& C = p.C;
    const Mat Bt = B.transpose();
    const auto dx = A.rows(), dy = C.rows();
    const double a = cfg.alpha, b = cfg.beta, g = cfg.gamma, d = cfg.delta;
    constexpr bool bilinear = std::is_same_v<P, BilinearGame>;

    IterationMatrix out;
    switch (cfg.algo) {
        case Algo::SimGDA: {
            out.M = detail::sim_matrix(p, a, b);
            out.state_layout = "x,y";
            out.block_sizes = {dx, dy};
            break;
        }
        case Algo::AltGDA: {
            Blocks bl({dx, dy});
            Mat M(bl.total(), bl.total());
            const Mat Xa = eye(dx) - a * A;
            bl.blk(M, 0, 0) = Xa;
            bl.blk(M, 0, 1) = -a * B;
            bl.blk(M, 1, 0) = b * Bt * Xa;
            bl.blk(M, 1, 1) = eye(dy) - b * C - a * b * Bt * B;
            out.M = std::move(M);
            out.state_layout = "x,y";
            out.block_sizes = bl.size;
            break;
        }
        case Algo::AlexGDA: {
            if constexpr (bilinear) {
                Blocks bl({dx, dy, dy});
                Mat M = Mat::Zero(bl.total(), bl.total());
                const Mat BtB = Bt * B;
                bl.blk(M, 0, 0) = eye(dx);
                bl.blk(M, 0, 2) = -a * B;
                bl.blk(M, 1, 0) = b * Bt;
                bl.blk(M, 1, 1) = eye(dy);
                bl.blk(M, 1, 2) = -g * a * b * BtB;
                bl.blk(M, 2, 0) = d * b * Bt;
                bl.blk(M, 2, 1) = eye(dy);
                bl.blk(M, 2, 2) = -g * a * d * b * BtB;
                out.M = std::move(M);
                out.state_layout = "x,y,tilde_y";
                out.block_sizes = bl.size;
            } else {
                Blocks bl({dx, dx, dy, dy});
                Mat M = Mat::Zero(bl.total(), bl.total());
                const Mat Xg = eye(dx) - g * a * A;
                bl.blk(M, 0, 0) = eye(dx) - a * A;
                bl.blk(M, 0, 3) = -a * B;
                bl.blk(M, 1, 0) = Xg;
                bl.blk(M, 1, 3) = -g * a * B;
                bl.blk(M, 2, 0) = b * Bt * Xg;
                bl.blk(M, 2, 2) = eye(dy) - b * C;
                bl.blk(M, 2, 3) = -g * a * b * Bt * B;
                bl.blk(M, 3, 0) = d * b * Bt * Xg;
                bl.blk(M, 3, 2) = eye(dy) - d * b * C;
                bl.blk(M, 3, 3) = -g * d * a * b * Bt * B;
                out.M = std::move(M);
                out.state_layout = "x,tilde_x,y,tilde_y";
                out.block_sizes = bl.size;
            }
            break;
        }
        case Algo::EG: {
            const Mat M0 = detail::sim_matrix(p, a, b);
            const Mat M1 = detail::sim_matrix(p, cfg.alpha_1(), cfg.beta_1());
            const auto n = dx + dy;
            out.M = eye(n) + (M1 - eye(n)) * M0;
            out.state_layout = "x,y";
            out.block_sizes = {dx, dy};
            break;
        }
        case Algo::OGD: {
            Blocks bl({dx, dy, dx, dy});
            Mat M = Mat::Zero(bl.total(), bl.total());
            const double a1 = cfg.alpha_1(), b1 = cfg.beta_1();
            bl.blk(M, 0, 0) = eye(dx) - a * A;
            bl.blk(M, 0, 1) = -a * B;
            bl.blk(M, 0, 2) = a1 * A;
            bl.blk(M, 0, 3) = a1 * B;
            bl.blk(M, 1, 0) = b * Bt;
            bl.blk(M, 1, 1) = eye(dy) - b * C;
            bl.blk(M, 1, 2) = -b1 * Bt;
            bl.blk(M, 1, 3) = b1 * C;
            bl.blk(M, 2, 0) = eye(dx);
            bl.blk(M, 3, 1) = eye(dy);
            out.M = std::move(M);
            out.state_layout = "x,y,x_prev,y_prev";
            out.block_sizes = bl.size;
            break;
        }
        case Algo::SimGDA_M: {
            Blocks bl({dx, dy, dx, dy});
            Mat M = Mat::Zero(bl.total(), bl.total());
            bl.blk(M, 2, 0) = A;
            bl.blk(M, 2, 1) = B;
            bl.blk(M, 2, 2) = cfg.m_x * eye(dx);
            bl.blk(M, 3, 0) = Bt;
            bl.blk(M, 3, 1) = -C;
            bl.blk(M, 3, 3) = cfg.m_y * eye(dy);
            bl.blk(M, 0, 0) = eye(dx) - a * A;
            bl.blk(M, 0, 1) = -a * B;
            bl.blk(M, 0, 2) = -a * cfg.m_x * eye(dx);
            bl.blk(M, 1, 0) = b * Bt;
            bl.blk(M, 1, 1) = eye(dy) - b * C;
            bl.blk(M, 1, 3) = b * cfg.m_y * eye(dy);
            out.M = std::move(M);
            out.state_layout = "x,y,v_x,v_y";
            out.block_sizes = bl.size;
            break;
        }
        case Algo::AltGDA_M: {
            // x half then y half, each an explicit linear stage
            Blocks bl({dx, dy, dx, dy});
            Mat S1 = eye(bl.total()), S2 = eye(bl.total());
            bl.blk(S1, 2, 0) = A;
            bl.blk(S1, 2, 1) = B;
            bl.blk(S1, 2, 2) = cfg.m_x * eye(dx);
            bl.blk(S1, 0, 0) = eye(dx) - a * A;
            bl.blk(S1, 0, 1) = -a * B;
            bl.blk(S1, 0, 2) = -a * cfg.m_x * eye(dx);
            bl.blk(S2, 3, 0) = Bt;
            bl.blk(S2, 3, 1) = -C;
            bl.blk(S2, 3, 3) = cfg.m_y * eye(dy);
            bl.blk(S2, 1, 0) = b * Bt;
            bl.blk(S2, 1, 1) = eye(dy) - b * C;
            bl.blk(S2, 1, 3) = b * cfg.m_y * eye(dy);
            out.M = S2 * S1;
            out.state_layout = "x,y,v_x,v_y";
            out.block_sizes = bl.size;
            break;
        }
        case Algo::AlexGDA_M: {
            Blocks bl({dx, dx, dy, dy, dx, dy});
            Mat S1 = eye(bl.total()), S2 = eye(bl.total());
            // v_x' = m_x v_x + A x + B ty;  x' = x - a v_x';  tx' = x - g a v_x'
            bl.blk(S1, 4, 0) = A;
            bl.blk(S1, 4, 3) = B;
            bl.blk(S1, 4, 4) = cfg.m_x * eye(dx);
            bl.blk(S1, 0, 0) = eye(dx) - a * A;
            bl.blk(S1, 0, 3) = -a * B;
            bl.blk(S1, 0, 4) = -a * cfg.m_x * eye(dx);
            bl.blk(S1, 1, 0) = eye(dx) - g * a * A;
            bl.blk(S1, 1, 1).setZero();
            bl.blk(S1, 1, 3) = -g * a * B;
            bl.blk(S1, 1, 4) = -g * a * cfg.m_x * eye(dx);
            // v_y' = m_y v_y + B' tx - C y;  y' = y + b v_y';  ty' = y + d b v_y'
            bl.blk(S2, 5, 1) = Bt;
            bl.blk(S2, 5, 2) = -C;
            bl.blk(S2, 5, 5) = cfg.m_y * eye(dy);
            bl.blk(S2, 2, 1) = b * Bt;
            bl.blk(S2, 2, 2) = eye(dy) - b * C;
            bl.blk(S2, 2, 5) = b * cfg.m_y * eye(dy);
            bl.blk(S2, 3, 1) = d * b * Bt;
            bl.blk(S2, 3, 2) = eye(dy) - d * b * C;
            bl.blk(S2, 3, 3).setZero();
            bl.blk(S2, 3, 5) = d * b * cfg.m_y * eye(dy);
            out.M = S2 * S1;
            out.state_layout = "x,tilde_x,y,tilde_y,v_x,v_y";
            out.block_sizes = bl.size;
            break;
        }
    }
    return out;
}

// Stacked initial state in the layout of build_matrix.
template <Objective P>
Vec stack_initial(const P& problem, Algo algo, const JointPoint& z0) {
    problem.check_point(z0.x, z0.y);
    const auto dx = problem.dx(), dy = problem.dy();
    constexpr bool bilinear = std::is_same_v<P, BilinearGame>;
    Vec v;
    switch (algo) {
        case Algo::SimGDA:
        case Algo::AltGDA:
        case Algo::EG:
            v.resize(dx + dy);
            v << z0.x, z0.y;
            break;
        case Algo::AlexGDA:
            if (bilinear) {
                v.resize(dx + 2 * dy);
                v << z0.x, z0.y, z0.y;
            } else {
                v.resize(2 * dx + 2 * dy);
                v << z0.x, z0.x, z0.y, z0.y;
            }
            break;
        case Algo::OGD:
        case Algo::SimGDA_M:
        case Algo::AltGDA_M:
            v = Vec::Zero(2 * (dx + dy));
            v.head(dx) = z0.x;
            v.segment(dx, dy) = z0.y;
            break;
        case Algo::AlexGDA_M:
            v = Vec::Zero(3 * dx + 3 * dy);
            v << z0.x, z0.x, z0.y, z0.y, Vec::Zero(dx), Vec::Zero(dy);
            break;
    }
    return v;
}

// Extract (x, y) from a stacked state.
template <Objective P>
JointPoint unstack_point(const P& problem, Algo algo, const Vec& v) {
    const auto dx = problem.dx(), dy = problem.dy();
    const bool tilde_x_block = (algo == Algo::AlexGDA && !std::is_same_v<P, BilinearGame>) || algo == Algo::AlexGDA_M;
    const Eigen::Index yoff = tilde_x_block ? 2 * dx : dx;
    return {v.head(dx), v.segment(yoff, dy)};
}

// Gelfand estimate ||M^(2^j)||_2^(1/2^j) with rescaling after every squaring.
inline double spectral_radius(const Mat& M, double tol = 1e-12, int max_doublings = 40) {
    if (M.rows() != M.cols()) throw dimension_error("spectral_radius: matrix is not square");
    if (!M.allFinite()) throw domain_error("spectral_radius: non-finite entries");
    if (M.size() == 0) return 0.0;
    double s = M.cwiseAbs().maxCoeff();
    if (s == 0.0) return 0.0;
    Mat P = M / s;
    double log_scale = std::log(s);
    double est = std::exp(log_scale) * linalg::norm2(P);
    int calm = 0;
    double pow2 = 1.0;
    for (int j = 1; j <= max_doublings; ++j) {
        P = (P * P).eval();
        log_scale *= 2.0;
        pow2 *= 2.0;
        s = P.cwiseAbs().maxCoeff();
        if (s == 0.0 || !std::isfinite(s)) return s == 0.0 ? 0.0 : est;
        P /= s;
        log_scale += std::log(s);
        const double nrm = linalg::norm2(P);
        if (nrm == 0.0) return 0.0;
        const double next = std::exp((log_scale + std::log(nrm)) / pow2);
        const bool small = std::abs(next - est) < tol;
        est = next;
        calm = small ? calm + 1 : 0;
        if (calm >= 2) break;
    }
    return est;
}

enum class StabilityMethod { closed_form_cubic, closed_form_delta1, quartic_roots, gelfand };

inline const char* to_string(StabilityMethod m) {
    switch (m) {
        case StabilityMethod::closed_form_cubic: return "closed_form_cubic";
        case StabilityMethod::closed_form_delta1: return "closed_form_delta1";
        case StabilityMethod::quartic_roots: return "quartic_roots";
        case StabilityMethod::gelfand: return "gelfand";
    }
    return "?";
}

struct StabilityReport {
    double spectral_radius = 0.0;
    StabilityMethod method = StabilityMethod::gelfand;
    std::vector<cplx> per_block_roots;
    bool stable = false;
};

struct Cubic {
    double a2 = 0.0, a1 = 0.0, a0 = 0.0;
    std::array<cplx, 3> roots;
};

// lambda (lambda - 1)^2 + phi (gamma (lambda - 1) + 1)(delta (lambda - 1) + 1)
inline Cubic alex_bilinear_cubic(double phi, double gamma, double delta) {
    Cubic c;
    c.a2 = phi * gamma * delta - 2.0;
    c.a1 = 1.0 - phi * (2.0 * gamma * delta - gamma - delta);
    c.a0 = phi * (gamma - 1.0) * (delta - 1.0);
    c.roots = poly::cubic_roots(c.a2, c.a1, c.a0);
    return c;
}

// Largest root modulus of the delta = 1 Alex-GDA block for one singular value.
inline double delta1_radius(double alpha_beta, double gamma, double sigma) {
    const double t = alpha_beta * sigma * sigma;
    if (gamma * gamma * t <= 4.0) return std::sqrt(std::max(0.0, 1.0 - (gamma - 1.0) * t));
    return std::abs(1.0 - 0.5 * gamma * t) + 0.5 * std::sqrt((gamma * gamma * t - 4.0) * t);
}

// Spectral radius over the range of B; directions in null(B) / null(B') are
// fixed points of every algorithm and are left out.
inline StabilityReport alex_bilinear_rho(const BilinearGame& game, double alpha, double beta, double gamma,
                                         double delta) {
    StabilityReport rep;
    const Vec sv = game.singular_values();
    const double ab = alpha * beta;
    rep.method = delta == 1.0 ? StabilityMethod::closed_form_delta1 : StabilityMethod::closed_form_cubic;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const auto cub = alex_bilinear_cubic(ab * sv[i] * sv[i], gamma, delta);
        rep.per_block_roots.insert(rep.per_block_roots.end(), cub.roots.begin(), cub.roots.end());
        const double r = delta == 1.0 ? delta1_radius(ab, gamma, sv[i]) : poly::max_modulus(cub.roots);
        rep.spectral_radius = std::max(rep.spectral_radius, r);
    }
    rep.stable = rep.spectral_radius < 1.0;
    return rep;
}

struct Quartic {
    double p = 0.0, q = 0.0, r = 0.0, l = 0.0;
    // monic coefficients of x^4 + a3 x^3 + a2 x^2 + a1 x + a0
    double a3() const { return -p; }
    double a2() const { return q; }
    double a1() const { return -r; }
    double a0() const { return l; }
};

// Characteristic quartic of canonical OGD on the coupled 2x2 block, a = alpha mu_x, b = beta mu_y.
inline Quartic ogd_quartic(double a, double b, double kappa_xy) {
    const double k = a * b * (kappa_xy * kappa_xy + 1.0);
    return {2.0 - 2.0 * (a + b), 1.0 - 3.0 * a - 3.0 * b + 4.0 * k, -a - b + 4.0 * k, k};
}

namespace detail {

inline void push_quadratic_roots(double b1, double b0, std::vector<cplx>& out) {
    // x^2 + b1 x + b0
    const double disc = b1 * b1 - 4.0 * b0;
    if (disc >= 0.0) {
        const double q = -0.5 * (b1 + std::copysign(std::sqrt(disc), b1));
        const double r1 = q;
        const double r2 = q != 0.0 ? b0 / q : 0.0;
        out.emplace_back(r1, 0.0);
        out.emplace_back(r2, 0.0);
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        out.emplace_back(-0.5 * b1, im);
        out.emplace_back(-0.5 * b1, -im);
    }
}

}  // namespace detail

// Canonical OGD on the six-dimensional worst-case game: the coupled block
// gives the quartic, the four decoupled coordinates give quadratics.
inline StabilityReport ogd_worstcase_rho(const ProblemParams& prm, double alpha, double beta) {
    StabilityReport rep;
    rep.method = StabilityMethod::quartic_roots;
    const auto q = ogd_quartic(alpha * prm.mu_x, beta * prm.mu_y, prm.kappa_xy());
    const auto roots = poly::quartic_roots(q.a3(), q.a2(), q.a1(), q.a0());
    rep.per_block_roots.assign(roots.begin(), roots.end());
    // lambda^2 - (1 - 2 alpha h) lambda - alpha h for x, same with beta for y
    for (double h : {prm.mu_x, prm.L_x}) detail::push_quadratic_roots(-(1.0 - 2.0 * alpha * h), -alpha * h, rep.per_block_roots);
    for (double h : {prm.mu_y, prm.L_y}) detail::push_quadratic_roots(-(1.0 - 2.0 * beta * h), -beta * h, rep.per_block_roots);
    rep.spectral_radius = poly::max_modulus(rep.per_block_roots);
    rep.stable = rep.spectral_radius < 1.0;
    return rep;
}

inline StabilityReport gelfand_report(const Mat& M, double tol = 1e-12) {
    StabilityReport rep;
    rep.method = StabilityMethod::gelfand;
    rep.spectral_radius = spectral_radius(M, tol);
    rep.stable = rep.spectral_radius < 1.0;
    return rep;
}

// Structured path when one applies, Gelfand otherwise.
template <Objective P>
StabilityReport analyze(const P& problem, const AlgorithmConfig& cfg, double tol = 1e-12) {
    if constexpr (std::is_same_v<P, BilinearGame>) {
        if (cfg.algo == Algo::AlexGDA) return alex_bilinear_rho(problem, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta);
    }
    if constexpr (std::is_same_v<P, QuadraticGame>) {
        const bool canonical = cfg.alpha_1() == 0.5 * cfg.alpha && cfg.beta_1() == 0.5 * cfg.beta;
        if (cfg.algo == Algo::OGD && problem.kind() == ProblemKind::worstcase6d && canonical)
            return ogd_worstcase_rho(problem.params(), cfg.alpha_1(), cfg.beta_1());
    }
    return gelfand_report(build_matrix(problem, cfg).M, tol);
}

inline StabilityReport analyze(const Game& g, const AlgorithmConfig& cfg, double tol = 1e-12) {
    return std::visit([&](const auto& p) { return analyze(p, cfg, tol); }, g);
}

}  // namespace minimax::spectral
