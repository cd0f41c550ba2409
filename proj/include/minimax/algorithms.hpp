#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "minimax/core.hpp"
#include "minimax/problems.hpp"

namespace minimax {

enum class Algo { SimGDA, AltGDA, AlexGDA, EG, OGD, SimGDA_M, AltGDA_M, AlexGDA_M };

inline const char* to_string(Algo a) {
    switch (a) {
        case Algo::SimGDA: return "sim";
        case Algo::AltGDA: return "alt";
        case Algo::AlexGDA: return "alex";
        case Algo::EG: return "eg";
        case Algo::OGD: return "ogd";
        case Algo::SimGDA_M: return "sim_m";
        case Algo::AltGDA_M: return "alt_m";
        case Algo::AlexGDA_M: return "alex_m";
    }
    return "?";
}

inline std::optional<Algo> parse_algo(std::string_view s) {
    for (Algo a : {Algo::SimGDA, Algo::AltGDA, Algo::AlexGDA, Algo::EG, Algo::OGD, Algo::SimGDA_M, Algo::AltGDA_M,
                   Algo::AlexGDA_M})
        if (s == to_string(a)) return a;
    return std::nullopt;
}

inline bool is_momentum(Algo a) { return a == Algo::SimGDA_M || a == Algo::AltGDA_M || a == Algo::AlexGDA_M; }
inline bool is_alex(Algo a) { return a == Algo::AlexGDA || a == Algo::AlexGDA_M; }

struct AlgorithmConfig {
    Algo algo = Algo::SimGDA;
    double alpha = 0.0;
    double beta = 0.0;
    // EG: second step sizes, default alpha/beta. OGD: weight on the previous
    // gradient, default alpha/2 and beta/2 (canonical OGD with step alpha/2).
    std::optional<double> alpha1;
    std::optional<double> beta1;
    double gamma = 1.0;
    double delta = 1.0;
    double m_x = 0.0;
    double m_y = 0.0;

    double alpha_1() const {
        if (alpha1) return *alpha1;
        return algo == Algo::OGD ? 0.5 * alpha : alpha;
    }
    double beta_1() const {
        if (beta1) return *beta1;
        return algo == Algo::OGD ? 0.5 * beta : beta;
    }

    void validate() const {
        if (!(alpha >= 0.0) || !(beta >= 0.0)) throw domain_error("AlgorithmConfig: step sizes must be nonnegative");
        if (!(alpha_1() >= 0.0) || !(beta_1() >= 0.0))
            throw domain_error("AlgorithmConfig: alpha1/beta1 must be nonnegative");
        if (!(gamma >= 0.0) || !(delta >= 0.0)) throw domain_error("AlgorithmConfig: gamma and delta must be nonnegative");
        if (!std::isfinite(m_x) || !std::isfinite(m_y)) throw domain_error("AlgorithmConfig: momentum must be finite");
    }
};

struct AlgoState {
    JointPoint current;
    Vec tilde_x;
    Vec tilde_y;
    Vec prev_gx;
    Vec prev_gy;
    Vec velocity_x;
    Vec velocity_y;
    std::uint64_t grad_calls = 0;
    std::uint64_t iter = 0;
};

template <Objective P>
AlgoState init_state(const P& problem, const JointPoint& z0) {
    problem.check_point(z0.x, z0.y);
    AlgoState s;
    s.current = z0;
    s.tilde_x = z0.x;
    s.tilde_y = z0.y;
    s.prev_gx = Vec::Zero(problem.dx());
    s.prev_gy = Vec::Zero(problem.dy());
    s.velocity_x = Vec::Zero(problem.dx());
    s.velocity_y = Vec::Zero(problem.dy());
    return s;
}

// Scratch vectors so the in-place steps do not allocate.
struct Workspace {
    Vec gx, gy, hx, hy;

    template <Objective P>
    explicit Workspace(const P& p) : gx(p.dx()), gy(p.dy()), hx(p.dx()), hy(p.dy()) {}
};

namespace detail {

template <Objective P>
void sim_inplace(const P& p, const AlgorithmConfig& c, AlgoState& s, Workspace& w) {
    auto& x = s.current.x;
    auto& y = s.current.y;
    p.grad_x(x, y, w.gx);
    p.grad_y(x, y, w.gy);
    x -= c.alpha * w.gx;
    y += c.beta * w.gy;
    s.grad_calls += 2;
}

template <Objective P>
void alt_inplace(const P& p, const AlgorithmConfig& c, AlgoState& s, Workspace& w) {
    auto& x = s.current.x;
    auto& y = s.current.y;
    p.grad_x(x, y, w.gx);
    x -= c.alpha * w.gx;
    p.grad_y(x, y, w.gy);
    y += c.beta * w.gy;
    s.grad_calls += 2;
}

template <Objective P>
void alex_inplace(const P& p, const AlgorithmConfig& c, AlgoState& s, Workspace& w) {
    auto& x = s.current.x;
    auto& y = s.current.y;
    const double ga = c.gamma * c.alpha;
    const double db = c.delta * c.beta;
    p.grad_x(x, s.tilde_y, w.gx);
    s.tilde_x = x - ga * w.gx;
    x -= c.alpha * w.gx;
    p.grad_y(s.tilde_x, y, w.gy);
    s.tilde_y = y + db * w.gy;
    y += c.beta * w.gy;
    s.grad_calls += 2;
}

template <Objective P>
void eg_inplace(const P& p, const AlgorithmConfig& c, AlgoState& s, Workspace& w) {
    auto& x = s.current.x;
    auto& y = s.current.y;
    p.grad_x(x, y, w.gx);
    p.grad_y(x, y, w.gy);
    w.hx = x - c.alpha * w.gx;
    w.hy = y + c.beta * w.gy;
    p.grad_x(w.hx, w.hy, w.gx);
    p.grad_y(w.hx, w.hy, w.gy);
    x -= c.alpha_1() * w.gx;
    y += c.beta_1() * w.gy;
    s.grad_calls += 4;
}

template <Objective P>
void ogd_inplace(const P& p, const AlgorithmConfig& c, AlgoState& s, Workspace& w) {
    auto& x = s.current.x;
    auto& y = s.current.y;
    p.grad_x(x, y, w.gx);
    p.grad_y(x, y, w.gy);
    x += -c.alpha * w.gx + c.alpha_1() * s.prev_gx;
    y += c.beta * w.gy - c.beta_1() * s.prev_gy;
    s.prev_gx = w.gx;
    s.prev_gy = w.gy;
    s.grad_calls += 2;
}

template <Objective P>
void momentum_inplace(const P& p, const AlgorithmConfig& c, AlgoState& s, Workspace& w) {
    auto& x = s.current.x;
    auto& y = s.current.y;
    auto& vx = s.velocity_x;
    auto& vy = s.velocity_y;
    switch (c.algo) {
        case Algo::SimGDA_M:
            p.grad_x(x, y, w.gx);
            p.grad_y(x, y, w.gy);
            vx = c.m_x * vx + w.gx;
            vy = c.m_y * vy + w.gy;
            x -= c.alpha * vx;
            y += c.beta * vy;
            break;
        case Algo::AltGDA_M:
            p.grad_x(x, y, w.gx);
            vx = c.m_x * vx + w.gx;
            x -= c.alpha * vx;
            p.grad_y(x, y, w.gy);
            vy = c.m_y * vy + w.gy;
            y += c.beta * vy;
            break;
        case Algo::AlexGDA_M: {
            const double ga = c.gamma * c.alpha;
            const double db = c.delta * c.beta;
            p.grad_x(x, s.tilde_y, w.gx);
            vx = c.m_x * vx + w.gx;
            s.tilde_x = x - ga * vx;
            x -= c.alpha * vx;
            p.grad_y(s.tilde_x, y, w.gy);
            vy = c.m_y * vy + w.gy;
            s.tilde_y = y + db * vy;
            y += c.beta * vy;
            break;
        }
        default: throw domain_error("momentum step called with a non-momentum algorithm");
    }
    s.grad_calls += 2;
}

}  // namespace detail

// One iteration in place.
template <Objective P>
void advance(const P& problem, const AlgorithmConfig& cfg, AlgoState& s, Workspace& w) {
    switch (cfg.algo) {
        case Algo::SimGDA: detail::sim_inplace(problem, cfg, s, w); break;
        case Algo::AltGDA: detail::alt_inplace(problem, cfg, s, w); break;
        case Algo::AlexGDA: detail::alex_inplace(problem, cfg, s, w); break;
        case Algo::EG: detail::eg_inplace(problem, cfg, s, w); break;
        case Algo::OGD: detail::ogd_inplace(problem, cfg, s, w); break;
        case Algo::SimGDA_M:
        case Algo::AltGDA_M:
        case Algo::AlexGDA_M: detail::momentum_inplace(problem, cfg, s, w); break;
    }
    ++s.iter;
}

template <Objective P>
AlgoState step(const AlgoState& state, const P& problem, const AlgorithmConfig& cfg) {
    AlgoState next = state;
    Workspace w(problem);
    advance(problem, cfg, next, w);
    return next;
}

namespace detail {
template <Objective P>
AlgoState step_as(Algo a, const AlgoState& state, const P& problem, AlgorithmConfig cfg) {
    cfg.algo = a;
    return step(state, problem, cfg);
}
}  // namespace detail

template <Objective P>
AlgoState step_sim(const AlgoState& s, const P& p, const AlgorithmConfig& c) {
    return detail::step_as(Algo::SimGDA, s, p, c);
}
template <Objective P>
AlgoState step_alt(const AlgoState& s, const P& p, const AlgorithmConfig& c) {
    return detail::step_as(Algo::AltGDA, s, p, c);
}
template <Objective P>
AlgoState step_alex(const AlgoState& s, const P& p, const AlgorithmConfig& c) {
    return detail::step_as(Algo::AlexGDA, s, p, c);
}
template <Objective P>
AlgoState step_eg(const AlgoState& s, const P& p, const AlgorithmConfig& c) {
    return detail::step_as(Algo::EG, s, p, c);
}
template <Objective P>
AlgoState step_ogd(const AlgoState& s, const P& p, const AlgorithmConfig& c) {
    return detail::step_as(Algo::OGD, s, p, c);
}
template <Objective P>
AlgoState step_momentum(const AlgoState& s, const P& p, const AlgorithmConfig& c) {
    if (!is_momentum(c.algo)) throw domain_error("step_momentum needs sim_m, alt_m or alex_m");
    return step(s, p, c);
}

inline constexpr double divergence_threshold = 1e150;

inline bool diverged(const JointPoint& z) {
    const auto bad = [](const Vec& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (!(std::abs(v[i]) <= divergence_threshold)) return true;
        return false;
    };
    return bad(z.x) || bad(z.y);
}

}  // namespace minimax
