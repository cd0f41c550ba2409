#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "minimax/algorithms.hpp"
#include "minimax/lyapunov.hpp"
#include "minimax/problems.hpp"

namespace minimax {

struct TraceRecord {
    std::uint64_t iter = 0;
    std::uint64_t grad_calls = 0;
    double dist_sq = 0.0;
    std::optional<double> lyapunov;
};

struct RunOptions {
    double eps = 1e-12;
    std::uint64_t max_iters = 100000;
    // stop (not converged) once grad_calls would exceed this; 0 disables
    std::uint64_t max_grad_calls = 0;
    bool record_trace = true;
    bool keep_states = false;
    std::optional<LyapunovKind> lyapunov;
    // distance reference; defaults to the problem's Nash point for z0
    std::optional<JointPoint> nash;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    std::vector<AlgoState> states;
    bool converged = false;
    bool diverged = false;
    std::uint64_t iterations = 0;
    std::uint64_t grad_calls = 0;
    double final_dist_sq = 0.0;
    JointPoint nash;
};

namespace detail {

template <Objective P>
JointPoint default_nash(const P& problem, const JointPoint& z0) {
    if constexpr (std::is_same_v<P, BilinearGame>)
        return nash_equilibrium(problem, z0);
    else if constexpr (std::is_same_v<P, QuadraticGame>)
        return nash_equilibrium(problem);
    else
        return {Vec::Zero(problem.dx()), Vec::Zero(problem.dy())};
}

template <Objective P>
double lyap_value(const LyapunovKind& k, const P& problem, const AlgoState* prev, const AlgoState& cur,
                  const AlgoState& next, const JointPoint& zs) {
    switch (k.kind) {
        case LyapunovKind::Type::Sim: return psi_sim(k, cur.current, zs);
        case LyapunovKind::Type::Alt: return psi_alt(k, problem, cur, next, zs);
        case LyapunovKind::Type::Alex: return psi_alex(k, problem, AlexWindow{prev, &cur, &next}, prev == nullptr, zs);
    }
    return 0.0;
}

}  // namespace detail

// Iterates until ||z_k - z*||^2 <= eps, divergence, or max_iters.
// Row k carries Psi_k when a Lyapunov kind is given; Psi_k needs iterate
// k+1, which is computed but not counted for the final row.
template <Objective P>
RunResult run(const P& problem, const AlgorithmConfig& cfg, const JointPoint& z0, const RunOptions& opt) {
    cfg.validate();
    if (!(opt.eps > 0.0)) throw domain_error("run: eps must be positive");
    RunResult res;
    res.nash = opt.nash ? *opt.nash : detail::default_nash(problem, z0);
    const JointPoint& zs = res.nash;

    Workspace w(problem);
    AlgoState cur = init_state(problem, z0);
    AlgoState next, prev;
    bool have_prev = false;
    const bool lyap = opt.lyapunov.has_value();
    if (lyap) opt.lyapunov->validate();

    for (;;) {
        const double d = dist_sq(cur.current, zs);
        const bool bad = diverged(cur.current);
        const bool done = !bad && d <= opt.eps;
        const bool budget = opt.max_grad_calls > 0 && cur.grad_calls >= opt.max_grad_calls;
        const bool last = bad || done || cur.iter >= opt.max_iters || budget;

        TraceRecord rec{cur.iter, cur.grad_calls, bad ? std::numeric_limits<double>::infinity() : d, std::nullopt};
        if (lyap && !bad) {
            next = cur;
            advance(problem, cfg, next, w);
            rec.lyapunov = detail::lyap_value(*opt.lyapunov, problem, have_prev ? &prev : nullptr, cur, next, zs);
        }
        if (opt.record_trace) res.trace.push_back(rec);
        if (opt.keep_states) res.states.push_back(cur);

        if (last) {
            res.converged = done;
            res.diverged = bad;
            res.iterations = cur.iter;
            res.grad_calls = cur.grad_calls;
            res.final_dist_sq = rec.dist_sq;
            if (opt.keep_states && lyap && !bad) res.states.push_back(next);
            break;
        }
        if (lyap) {
            std::swap(prev, cur);
            std::swap(cur, next);
            have_prev = true;
        } else {
            advance(problem, cfg, cur, w);
        }
    }
    return res;
}

template <Objective P>
RunResult run(const P& problem, const AlgorithmConfig& cfg, const JointPoint& z0, double eps,
              std::uint64_t max_iters) {
    RunOptions opt;
    opt.eps = eps;
    opt.max_iters = max_iters;
    return run(problem, cfg, z0, opt);
}

// Run on a type-erased game.
inline RunResult run(const Game& g, const AlgorithmConfig& cfg, const JointPoint& z0, const RunOptions& opt) {
    return std::visit([&](const auto& p) { return run(p, cfg, z0, opt); }, g);
}

}  // namespace minimax
