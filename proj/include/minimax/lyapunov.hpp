#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "minimax/algorithms.hpp"
#include "minimax/problems.hpp"

namespace minimax {

struct LyapunovKind {
    enum class Type { Sim, Alt, Alex };
    Type kind = Type::Sim;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 1.0;
    ProblemParams params;

    void validate() const {
        if (!(alpha > 0.0) || !(beta > 0.0)) throw domain_error("LyapunovKind: step sizes must be positive");
        if (kind == Type::Alt && (!(alpha * params.mu_x < 1.0) || !(beta * params.mu_y < 1.0)))
            throw domain_error("LyapunovKind: Alt needs alpha < 1/mu_x and beta < 1/mu_y");
        if (kind == Type::Alex && !(alpha * params.mu_x < 1.0))
            throw domain_error("LyapunovKind: Alex needs alpha < 1/mu_x");
        if (kind == Type::Alex && !(beta * params.mu_y < 1.0))
            throw domain_error("LyapunovKind: Alex needs beta < 1/mu_y");
    }
};

inline const char* to_string(LyapunovKind::Type t) {
    switch (t) {
        case LyapunovKind::Type::Sim: return "sim";
        case LyapunovKind::Type::Alt: return "alt";
        case LyapunovKind::Type::Alex: return "alex";
    }
    return "?";
}

inline double psi_sim(const LyapunovKind& k, const JointPoint& z, const JointPoint& zs) {
    return (z.x - zs.x).squaredNorm() / k.alpha + (z.y - zs.y).squaredNorm() / k.beta;
}

// Needs consecutive Alt iterates z_k and x_{k+1}.
template <Objective P>
double psi_alt(const LyapunovKind& k, const P& problem, const JointPoint& zk, const Vec& x_next,
               const JointPoint& zs) {
    const auto& p = k.params;
    Vec g(problem.dx());
    problem.grad_x(zk.x, zk.y, g);
    const double cx = 1.0 / k.alpha - p.mu_x;
    return cx * (zk.x - zs.x).squaredNorm() + 2.0 * (1.0 / k.beta - p.mu_y) * (zk.y - zs.y).squaredNorm() +
           cx * (x_next - zs.x).squaredNorm() - k.alpha * (1.0 - k.alpha * p.L_x) * g.squaredNorm();
}

template <Objective P>
double psi_alt(const LyapunovKind& k, const P& problem, const AlgoState& sk, const AlgoState& sk1,
               const JointPoint& zs) {
    return psi_alt(k, problem, sk.current, sk1.current.x, zs);
}

inline double alt_validity_floor(const LyapunovKind& k, const JointPoint& zk, const Vec& x_next,
                                 const JointPoint& zs) {
    const auto& p = k.params;
    return (0.5 / k.alpha - p.mu_x) * (zk.x - zs.x).squaredNorm() +
           2.0 * (0.75 / k.beta - p.mu_y) * (zk.y - zs.y).squaredNorm() +
           (1.0 / k.alpha - p.mu_x) * (x_next - zs.x).squaredNorm();
}

// Iterates around step k of Alex-GDA. prev is state k-1 and is ignored when k = 0.
struct AlexWindow {
    const AlgoState* prev = nullptr;
    const AlgoState* cur = nullptr;
    const AlgoState* next = nullptr;
};

template <Objective P>
double psi_alex(const LyapunovKind& k, const P& problem, const AlexWindow& w, bool k_is_zero, const JointPoint& zs) {
    if (w.cur == nullptr || w.next == nullptr || (!k_is_zero && w.prev == nullptr))
        throw domain_error("psi_alex: insufficient history");
    const auto& p = k.params;
    const auto& xk = w.cur->current.x;
    const auto& yk = w.cur->current.y;
    Vec gx(problem.dx()), gy(problem.dy());
    problem.grad_x(xk, w.cur->tilde_y, gx);
    double psi = (xk - zs.x).squaredNorm() / k.alpha + 2.0 * (yk - zs.y).squaredNorm() / k.beta +
                 (w.next->current.x - zs.x).squaredNorm() / k.alpha - k.alpha * gx.squaredNorm();
    const double coupling = (k.gamma - 1.0) * (k.delta - 1.0) * k.alpha * k.beta / (1.0 - k.alpha * p.mu_x) *
                            p.L_xy * std::sqrt(p.mu_y / p.mu_x);
    if (k_is_zero) {
        psi += coupling / (1.0 - k.beta * p.mu_y) * gx.squaredNorm();
    } else {
        problem.grad_y(w.cur->tilde_x, w.prev->current.y, gy);
        problem.grad_x(w.prev->current.x, w.prev->tilde_y, gx);
        psi += (k.delta - 1.0) * k.beta * gy.squaredNorm() + coupling * gx.squaredNorm();
    }
    return psi;
}

inline double alex_validity_floor(const LyapunovKind& k, const JointPoint& zk, const Vec& x_next,
                                  const JointPoint& zs) {
    return 0.5 / k.alpha * (zk.x - zs.x).squaredNorm() + 0.5 / k.beta * (zk.y - zs.y).squaredNorm() +
           (x_next - zs.x).squaredNorm() / k.alpha;
}

inline double sim_validity_floor(const LyapunovKind& k, const JointPoint& zk, const JointPoint& zs) {
    return std::min(1.0 / k.alpha, 1.0 / k.beta) * dist_sq(zk, zs);
}

// Psi_k for k = 0 .. states.size() - 2 (Alt and Alex look one iterate ahead).
template <Objective P>
std::vector<double> psi_sequence(const LyapunovKind& k, const P& problem, const std::vector<AlgoState>& states,
                                 const JointPoint& zs) {
    std::vector<double> out;
    if (states.empty()) return out;
    const std::size_t n = k.kind == LyapunovKind::Type::Sim ? states.size() : states.size() - 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (k.kind) {
            case LyapunovKind::Type::Sim: out.push_back(psi_sim(k, states[i].current, zs)); break;
            case LyapunovKind::Type::Alt: out.push_back(psi_alt(k, problem, states[i], states[i + 1], zs)); break;
            case LyapunovKind::Type::Alex: {
                AlexWindow w{i > 0 ? &states[i - 1] : nullptr, &states[i], &states[i + 1]};
                out.push_back(psi_alex(k, problem, w, i == 0, zs));
                break;
            }
        }
    }
    return out;
}

struct ContractionReport {
    std::string kind;
    double r = 0.0;
    bool holds = true;
    double worst_ratio = 0.0;
    std::optional<std::size_t> first_violation;
    std::size_t checked = 0;
};

inline constexpr double psi_floor = 1e-280;

// Checks psi[k+1] <= r * psi[k] * (1 + slack); steps with psi[k] < 1e-280 are skipped.
inline ContractionReport verify_contraction(const std::vector<double>& psi, double r, double slack = 0.0,
                                            std::string kind = {}) {
    ContractionReport rep;
    rep.kind = std::move(kind);
    rep.r = r;
    for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
        if (!(psi[i] >= psi_floor)) continue;
        const double ratio = psi[i + 1] / psi[i];
        ++rep.checked;
        if (ratio > rep.worst_ratio || std::isnan(ratio)) rep.worst_ratio = ratio;
        if (!(psi[i + 1] <= r * psi[i] * (1.0 + slack)) && rep.holds) {
            rep.holds = false;
            rep.first_violation = i;
        }
    }
    return rep;
}

template <Objective P>
ContractionReport verify_contraction(const LyapunovKind& k, const P& problem, const std::vector<AlgoState>& states,
                                     const JointPoint& zs, double r, double slack = 0.0) {
    return verify_contraction(psi_sequence(k, problem, states, zs), r, slack, to_string(k.kind));
}

}  // namespace minimax
