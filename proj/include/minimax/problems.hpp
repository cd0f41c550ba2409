#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "minimax/core.hpp"
#include "minimax/linalg.hpp"

namespace minimax {

struct ProblemParams {
    double mu_x = 1.0;
    double mu_y = 1.0;
    double L_x = 1.0;
    double L_y = 1.0;
    double L_xy = 0.0;

    double kappa_x() const { return L_x / mu_x; }
    double kappa_y() const { return L_y / mu_y; }
    double kappa_xy() const { return L_xy / std::sqrt(mu_x * mu_y); }

    void validate() const {
        if (!(mu_x > 0.0) || !(mu_y > 0.0)) throw domain_error("ProblemParams: mu_x and mu_y must be positive");
        if (!(mu_x <= L_x) || !(mu_y <= L_y)) throw domain_error("ProblemParams: need mu_x <= L_x and mu_y <= L_y");
        if (!(L_xy >= 0.0)) throw domain_error("ProblemParams: L_xy must be nonnegative");
        if (!std::isfinite(L_x) || !std::isfinite(L_y) || !std::isfinite(L_xy))
            throw domain_error("ProblemParams: non-finite constant");
    }

    // mu_x = mu_y = mu, L_x = L_y = L, L_xy given
    static ProblemParams symmetric(double mu, double L, double L_xy) { return {mu, mu, L, L, L_xy}; }
};

struct JointPoint {
    Vec x;
    Vec y;

    double squared_norm() const { return x.squaredNorm() + y.squaredNorm(); }
};

inline double dist_sq(const JointPoint& a, const JointPoint& b) {
    return (a.x - b.x).squaredNorm() + (a.y - b.y).squaredNorm();
}

enum class ProblemKind { quadratic, bilinear, worstcase6d };

inline const char* to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::quadratic: return "quadratic";
        case ProblemKind::bilinear: return "bilinear";
        case ProblemKind::worstcase6d: return "worstcase6d";
    }
    return "?";
}

// f(x, y) = 1/2 x'Ax + x'By - 1/2 y'Cy with A, C positive definite.
class QuadraticGame {
public:
    QuadraticGame(Mat A, Mat B, Mat C) : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
        check_shapes();
        params_ = extract_params();
        params_.validate();
    }

    // Trusts the caller for the constants; used by generators that know them exactly.
    QuadraticGame(Mat A, Mat B, Mat C, const ProblemParams& p, ProblemKind kind = ProblemKind::quadratic)
        : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), params_(p), kind_(kind) {
        check_shapes();
        params_.validate();
    }

    Eigen::Index dx() const { return A_.rows(); }
    Eigen::Index dy() const { return C_.rows(); }
    const Mat& A() const { return A_; }
    const Mat& B() const { return B_; }
    const Mat& C() const { return C_; }
    const ProblemParams& params() const { return params_; }
    ProblemKind kind() const { return kind_; }
    std::optional<std::uint64_t> seed() const { return seed_; }
    void set_seed(std::uint64_t s) { seed_ = s; }

    double value(const Vec& x, const Vec& y) const {
        check_point(x, y);
        return 0.5 * x.dot(A_ * x) + x.dot(B_ * y) - 0.5 * y.dot(C_ * y);
    }

    void grad_x(const Vec& x, const Vec& y, Vec& out) const {
        out.noalias() = A_ * x;
        out.noalias() += B_ * y;
    }

    void grad_y(const Vec& x, const Vec& y, Vec& out) const {
        out.noalias() = B_.transpose() * x;
        out.noalias() -= C_ * y;
    }

    ProblemParams extract_params() const {
        const auto ea = linalg::jacobi_eig(A_);
        const auto ec = linalg::jacobi_eig(C_);
        ProblemParams p;
        p.mu_x = ea.values[0];
        p.L_x = ea.values[ea.values.size() - 1];
        p.mu_y = ec.values[0];
        p.L_y = ec.values[ec.values.size() - 1];
        p.L_xy = linalg::max_singular_value(B_);
        return p;
    }

    void check_point(const Vec& x, const Vec& y) const {
        if (x.size() != dx() || y.size() != dy()) throw dimension_error("point dimension does not match the game");
    }

private:
    void check_shapes() const {
        if (A_.rows() == 0 || A_.rows() != A_.cols()) throw dimension_error("A must be square and non-empty");
        if (C_.rows() == 0 || C_.rows() != C_.cols()) throw dimension_error("C must be square and non-empty");
        if (B_.rows() != A_.rows() || B_.cols() != C_.rows()) throw dimension_error("B must be dx x dy");
        const double sa = std::max(1.0, A_.cwiseAbs().maxCoeff());
        const double sc = std::max(1.0, C_.cwiseAbs().maxCoeff());
        if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sa) throw domain_error("A must be symmetric");
        if ((C_ - C_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sc) throw domain_error("C must be symmetric");
    }

    Mat A_, B_, C_;
    ProblemParams params_;
    ProblemKind kind_ = ProblemKind::quadratic;
    std::optional<std::uint64_t> seed_;
};

// f(x, y) = x'By
class BilinearGame {
public:
    explicit BilinearGame(Mat B, double rank_tol = 1e-12) : B_(std::move(B)) {
        if (B_.rows() == 0 || B_.cols() == 0) throw dimension_error("B must be non-empty");
        svd_ = linalg::jacobi_svd(B_);
        L_xy_ = svd_.s[0];
        if (!(L_xy_ > 0.0)) throw domain_error("bilinear game needs a nonzero B");
        rank_ = 0;
        for (Eigen::Index i = 0; i < svd_.s.size(); ++i)
            if (svd_.s[i] > rank_tol * L_xy_) rank_ = i + 1;
        mu_xy_ = svd_.s[rank_ - 1];
    }

    Eigen::Index dx() const { return B_.rows(); }
    Eigen::Index dy() const { return B_.cols(); }
    const Mat& B() const { return B_; }
    double L_xy() const { return L_xy_; }
    double mu_xy() const { return mu_xy_; }
    Eigen::Index rank() const { return rank_; }
    const linalg::Svd& svd() const { return svd_; }
    ProblemKind kind() const { return ProblemKind::bilinear; }

    // nonzero singular values, descending
    Vec singular_values() const { return svd_.s.head(rank_); }

    double value(const Vec& x, const Vec& y) const {
        check_point(x, y);
        return x.dot(B_ * y);
    }

    void grad_x(const Vec&, const Vec& y, Vec& out) const { out.noalias() = B_ * y; }
    void grad_y(const Vec& x, const Vec&, Vec& out) const { out.noalias() = B_.transpose() * x; }

    void check_point(const Vec& x, const Vec& y) const {
        if (x.size() != dx() || y.size() != dy()) throw dimension_error("point dimension does not match the game");
    }

private:
    Mat B_;
    linalg::Svd svd_;
    double L_xy_ = 0.0;
    double mu_xy_ = 0.0;
    Eigen::Index rank_ = 0;
};

template <class P>
concept Objective = requires(const P& p, const Vec& x, const Vec& y, Vec& out) {
    { p.dx() } -> std::convertible_to<Eigen::Index>;
    { p.dy() } -> std::convertible_to<Eigen::Index>;
    { p.value(x, y) } -> std::convertible_to<double>;
    p.grad_x(x, y, out);
    p.grad_y(x, y, out);
    p.check_point(x, y);
};

using Game = std::variant<QuadraticGame, BilinearGame>;

struct ValueAndGrad {
    double value;
    Vec gx;
    Vec gy;
};

template <Objective P>
ValueAndGrad value_and_grad(const P& problem, const JointPoint& z) {
    problem.check_point(z.x, z.y);
    ValueAndGrad out{problem.value(z.x, z.y), Vec(problem.dx()), Vec(problem.dy())};
    problem.grad_x(z.x, z.y, out.gx);
    problem.grad_y(z.x, z.y, out.gy);
    return out;
}

// The unique saddle point of an SCSC quadratic game. The objective has no
// linear term, so the saddle system is homogeneous; it is still solved so that
// a singular system is reported.
inline JointPoint nash_equilibrium(const QuadraticGame& g) {
    const Eigen::Index n = g.dx() + g.dy();
    Mat K(n, n);
    K << g.A(), g.B(), g.B().transpose(), -g.C();
    Eigen::FullPivLU<Mat> lu(K);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) throw domain_error("nash_equilibrium: saddle system is singular");
    const Vec z = lu.solve(Vec::Zero(n));
    return {z.head(g.dx()), z.tail(g.dy())};
}

// Projection of z0 onto null(B') x null(B).
inline JointPoint nash_equilibrium(const BilinearGame& g, const JointPoint& z0) {
    g.check_point(z0.x, z0.y);
    const auto r = g.rank();
    const Mat U = g.svd().U.leftCols(r);
    const Mat V = g.svd().V.leftCols(r);
    return {z0.x - U * (U.transpose() * z0.x), z0.y - V * (V.transpose() * z0.y)};
}

inline JointPoint nash_equilibrium(const Game& g, const JointPoint& z0) {
    return std::visit(
        [&](const auto& p) -> JointPoint {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, BilinearGame>)
                return nash_equilibrium(p, z0);
            else
                return nash_equilibrium(p);
        },
        g);
}

inline QuadraticGame worst_case_6d(const ProblemParams& p) {
    p.validate();
    Mat A = Mat::Zero(3, 3), B = Mat::Zero(3, 3), C = Mat::Zero(3, 3);
    A.diagonal() << p.mu_x, p.mu_x, p.L_x;
    B(0, 0) = p.L_xy;
    C.diagonal() << p.mu_y, p.mu_y, p.L_y;
    return QuadraticGame(A, B, C, p, ProblemKind::worstcase6d);
}

// Diagonal cores conjugated by Haar orthogonal matrices. Draw order from
// Rng(seed): U (dx*dx normals, column-major), V (dy*dy), then the free
// diagonal entries of A, B, C in that order.
inline QuadraticGame random_quadratic(Eigen::Index dx, Eigen::Index dy, const ProblemParams& p, double mu_xy,
                                      std::uint64_t seed) {
    p.validate();
    if (dx < 2 || dy < 2) throw domain_error("random_quadratic: dx and dy must be at least 2");
    if (!(mu_xy >= 0.0) || mu_xy > p.L_xy) throw domain_error("random_quadratic: need 0 <= mu_xy <= L_xy");

    Rng rng(seed);
    const Mat U = linalg::random_orthogonal(dx, rng);
    const Mat V = linalg::random_orthogonal(dy, rng);

    Vec a(dx), c(dy);
    const Eigen::Index s = std::min(dx, dy);
    Vec b(s);
    a[0] = p.mu_x;
    a[1] = p.L_x;
    for (Eigen::Index i = 2; i < dx; ++i) a[i] = rng.uniform(p.mu_x, p.L_x);
    b[0] = mu_xy;
    b[1] = p.L_xy;
    for (Eigen::Index i = 2; i < s; ++i) b[i] = rng.uniform(mu_xy, p.L_xy);
    c[0] = p.mu_y;
    c[1] = p.L_y;
    for (Eigen::Index i = 2; i < dy; ++i) c[i] = rng.uniform(p.mu_y, p.L_y);

    Mat Bcore = Mat::Zero(dx, dy);
    for (Eigen::Index i = 0; i < s; ++i) Bcore(i, i) = b[i];

    Mat A = U.transpose() * a.asDiagonal() * U;
    Mat C = V.transpose() * c.asDiagonal() * V;
    A = 0.5 * (A + A.transpose()).eval();
    C = 0.5 * (C + C.transpose()).eval();
    Mat B = U.transpose() * Bcore * V;
    QuadraticGame g(std::move(A), std::move(B), std::move(C), p);
    g.set_seed(seed);
    return g;
}

// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
template <Objective P>
double check_gradient(const P& problem, const JointPoint& z, double h) {
    if (!(h > 0.0)) throw domain_error("check_gradient: h must be positive");
    const auto vg = value_and_grad(problem, z);
    double worst = 0.0;
    Vec x = z.x, y = z.y;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = problem.value(x, y);
        x[i] = xi - h;
        const double fm = problem.value(x, y);
        x[i] = xi;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, std::abs(vg.gx[i] - fd) / std::max(1.0, std::abs(vg.gx[i])));
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double yi = y[i];
        y[i] = yi + h;
        const double fp = problem.value(x, y);
        y[i] = yi - h;
        const double fm = problem.value(x, y);
        y[i] = yi;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, std::abs(vg.gy[i] - fd) / std::max(1.0, std::abs(vg.gy[i])));
    }
    return worst;
}

}  // namespace minimax
