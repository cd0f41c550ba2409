#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "minimax/core.hpp"
#include "minimax/problems.hpp"

namespace minimax::theory {

struct RatePrescription {
    std::string algo;
    double alpha = 0.0;
    double beta = 0.0;
    double r = 0.0;
    double A = 0.0;

    // ceil(ln(psi0 / (A eps)) / ln(1/r)); saturates when A <= 0 or r >= 1.
    std::uint64_t complexity(double psi0, double eps) const {
        if (!(psi0 >= 0.0) || !(eps > 0.0)) throw domain_error("complexity: need psi0 >= 0 and eps > 0");
        constexpr auto inf = std::numeric_limits<std::uint64_t>::max();
        if (!(A > 0.0) || !(r < 1.0)) return inf;
        const double num = std::log(psi0 / (A * eps));
        if (!(num > 0.0)) return 0;
        if (r <= 0.0) return 1;
        const double k = std::ceil(num / std::log(1.0 / r));
        return k >= 1.8e19 ? inf : static_cast<std::uint64_t>(k);
    }
};

inline RatePrescription sim_prescription(const ProblemParams& p) {
    p.validate();
    const double kappa = std::max(p.kappa_x(), p.kappa_y());
    const double kxy = p.kappa_xy();
    const double root = std::sqrt(kappa + kxy * kxy);
    const double xi = kxy + root;
    const double zeta = 2.0 * xi / ((1.0 + xi * xi) * root);
    RatePrescription out;
    out.algo = "sim";
    out.alpha = zeta / p.mu_x;
    out.beta = zeta / p.mu_y;
    const double q = (xi * xi - 1.0) / (xi * xi + 1.0);
    out.r = q * q;
    out.A = std::min(1.0 / out.alpha, 1.0 / out.beta);
    return out;
}

// Largest step sizes allowed by the Alt-GDA contraction theorem.
inline RatePrescription alt_prescription(const ProblemParams& p) {
    p.validate();
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double cx = p.L_xy > 0.0 ? std::sqrt(p.mu_y) / (p.L_xy * std::sqrt(p.L_x)) : inf;
    const double cy = p.L_xy > 0.0 ? std::sqrt(p.mu_x) / (p.L_xy * std::sqrt(p.L_y)) : inf;
    RatePrescription out;
    out.algo = "alt";
    const double a = 0.5 * std::min(1.0 / p.L_x, cx);
    const double b = 0.5 * std::min(1.0 / p.L_y, cy);
    out.alpha = a;
    out.beta = b;
    const double lxy2 = p.L_xy * p.L_xy;
    const double r1 = (1.0 / a - p.mu_x) / (1.0 / a - 2.0 * b * b * p.L_y * lxy2);
    const double r2 = (1.0 / b - p.mu_y) / (1.0 / b - a * a * p.L_x * lxy2);
    const double r3 = (1.0 / a - p.mu_x) * a;
    out.r = std::max({r1, r2, r3});
    out.A = std::min(0.5 / a - p.mu_x, 2.0 * (0.75 / b - p.mu_y));
    return out;
}

struct AlexConstants {
    double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
    double C() const { return std::min({C1, C2, C3, C4}); }
};

inline AlexConstants alex_constants(double gamma, double delta) {
    if (!(gamma > 1.0) || !(delta > 1.0)) throw domain_error("alex_constants: need gamma > 1 and delta > 1");
    const double g = gamma, d = delta;
    AlexConstants c;
    c.C1 = (g - 1.0) / (2.0 * g * g);
    c.C2 = (d - 1.0) / (2.0 * d * d);
    const double both = 1.0 / (2.0 * (g - 1.0) * (d - 1.0));
    c.C3 = std::min({1.0 / (3.0 * g - 2.0), (d - 1.0) / (2.0 * (g - 1.0) * d), both});
    c.C4 = std::min({1.0 / (3.0 * d - 2.0), (g - 1.0) / (2.0 * g * (d - 1.0)), both});
    return c;
}

inline RatePrescription alex_prescription(const ProblemParams& p, double gamma, double delta) {
    p.validate();
    const auto c = alex_constants(gamma, delta);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double sx = p.L_xy > 0.0 ? c.C3 * std::sqrt(p.mu_y / p.mu_x) / p.L_xy : inf;
    const double sy = p.L_xy > 0.0 ? c.C4 * std::sqrt(p.mu_x / p.mu_y) / p.L_xy : inf;
    RatePrescription out;
    out.algo = "alex";
    out.alpha = std::min(c.C1 / p.L_x, sx);
    out.beta = std::min(c.C2 / p.L_y, sy);
    out.r = std::max(1.0 - out.alpha * p.mu_x, 1.0 - out.beta * p.mu_y);
    out.A = std::min(0.5 / out.alpha, 1.0 / out.beta);
    return out;
}

struct StepRegion {
    bool convergent = false;
    // strict upper bound on alpha * beta * L_xy^2 when convergent
    double bound = 0.0;
};

inline StepRegion bilinear_step_region(double gamma, double delta) {
    const double g = gamma, d = delta;
    if (!(g + d > 2.0)) return {false, 0.0};
    if (4.0 * g * d - 3.0 * (g + d) + 2.0 >= 0.0) return {true, 4.0 / ((2.0 * g - 1.0) * (2.0 * d - 1.0))};
    return {true, (g + d - 2.0) / (-(g - 1.0) * (d - 1.0) * (g + d - 1.0))};
}

inline double bilinear_cgd(double gamma, double delta) {
    const double g = gamma, d = delta;
    if (!(g >= 1.0) || !(d >= 1.0)) throw domain_error("bilinear_cgd: need gamma, delta >= 1");
    if (!(g + d > 2.0)) throw domain_error("bilinear_cgd: need gamma + delta > 2");
    const double m = std::max(g, d);
    const double t = 2.0 * g * d - g - d;
    return std::max({(2.0 * g - 1.0) * (2.0 * d - 1.0) / 2.0, std::abs(g - d) * m * m, 2.0 * t * t / (g + d - 2.0)});
}

struct BilinearTuning {
    double alpha_beta = 0.0;
    double gamma = 0.0;
    double delta = 1.0;
    double rate = 0.0;
};

// Best (alpha*beta, gamma) for delta = 1.
inline BilinearTuning bilinear_optimal_delta1(double L_xy, double mu_xy) {
    if (!(mu_xy > 0.0) || !(mu_xy <= L_xy)) throw domain_error("bilinear_optimal_delta1: need 0 < mu_xy <= L_xy");
    const double L2 = L_xy * L_xy, m2 = mu_xy * mu_xy;
    BilinearTuning t;
    t.alpha_beta = 2.0 * m2 / (L2 * (L2 + m2));
    t.gamma = 1.0 + L2 / m2;
    t.delta = 1.0;
    t.rate = std::sqrt(std::max(0.0, (L2 - m2) / (L2 + m2)));
    return t;
}

// All roots of x^3 + a2 x^2 + a1 x + a0 strictly inside the unit disk.
inline bool schur_cubic(double a2, double a1, double a0) {
    return std::abs(a2 + a0) < 1.0 + a1 && std::abs(a2 - 3.0 * a0) < 3.0 - a1 && a0 * (a0 - a2) + a1 - 1.0 < 0.0;
}

// All roots of x^4 + a3 x^3 + a2 x^2 + a1 x + a0 strictly inside the unit disk.
inline bool schur_quartic(double a3, double a2, double a1, double a0) {
    const bool c1 = std::abs(a1 + a3) < 1.0 + a0 + a2;
    const bool c2 = std::abs(a1 - a3) < 2.0 * (1.0 - a0);
    const bool c3 = a2 - 3.0 * a0 < 3.0;
    const double lhs = a0 + a2 + a0 * a0 + a1 * a1 + a0 * a0 * a2 + a0 * a3 * a3;
    const double rhs = 1.0 + 2.0 * a0 * a2 + a1 * a3 + a0 * a1 * a3 + a0 * a0 * a0;
    return c1 && c2 && c3 && lhs < rhs;
}

}  // namespace minimax::theory
