#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "minimax/algorithms.hpp"
#include "minimax/io.hpp"
#include "minimax/problems.hpp"
#include "minimax/run.hpp"
#include "minimax/spectral.hpp"
#include "minimax/theory.hpp"

namespace minimax::harness {

using io::json;
using io::spec_error;

// MINIMAX_BENCH_THREADS wins over the requested count; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (const char* env = std::getenv("MINIMAX_BENCH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

// fn(i) for i in [0, n); results must be written to per-index slots.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

// Median of the slopes of segments joining adjacent (log x, log y) points.
inline std::optional<double> median_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw domain_error("median_slope: size mismatch");
    std::vector<double> s;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        s.push_back((std::log(ys[i + 1]) - std::log(ys[i])) / (std::log(xs[i + 1]) - std::log(xs[i])));
    if (s.empty()) return std::nullopt;
    std::sort(s.begin(), s.end());
    const std::size_t m = s.size() / 2;
    return s.size() % 2 ? s[m] : 0.5 * (s[m - 1] + s[m]);
}

// Inclusive arithmetic range, values rounded to 12 decimals.
inline std::vector<double> range(double from, double to, double step) {
    if (!(step > 0.0) || to < from) throw spec_error("range needs step > 0 and to >= from");
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::round((from + static_cast<double>(i) * step) * 1e12) / 1e12;
    return v;
}

inline std::vector<double> axis_from_json(const json& j, const char* name) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        std::vector<double> v;
        for (const auto& e : j) {
            if (!e.is_number()) throw spec_error(std::string("axis '") + name + "' has a non-numeric entry");
            v.push_back(e.get<double>());
        }
        if (v.empty()) throw spec_error(std::string("axis '") + name + "' is empty");
        return v;
    }
    if (j.is_object()) return range(io::number_at(j, "from"), io::number_at(j, "to"), io::number_at(j, "step"));
    throw spec_error(std::string("axis '") + name + "' must be a number, array or {from,to,step}");
}

// Step-size scale references of a game: mu = min(mu_x, mu_y), L = max(L_x, L_y, L_xy);
// for bilinear games mu = mu_xy and L = L_xy.
struct Scales {
    double mu = 1.0;
    double L = 1.0;
};

inline Scales scales_of(const Game& g) {
    if (const auto* q = std::get_if<QuadraticGame>(&g)) {
        const auto& p = q->params();
        return {std::min(p.mu_x, p.mu_y), std::max({p.L_x, p.L_y, p.L_xy})};
    }
    const auto& b = std::get<BilinearGame>(g);
    return {b.mu_xy(), b.L_xy()};
}

enum class StepScale { raw, c_over_L, inv_cL, c_mu_over_L2, mu_over_cL2 };

inline StepScale parse_scale(const std::string& s) {
    if (s == "C") return StepScale::raw;
    if (s == "C/L") return StepScale::c_over_L;
    if (s == "1/(C*L)") return StepScale::inv_cL;
    if (s == "C*mu/L^2") return StepScale::c_mu_over_L2;
    if (s == "mu/(C*L^2)") return StepScale::mu_over_cL2;
    throw spec_error("unknown step scale '" + s + "' (use C, C/L, 1/(C*L), C*mu/L^2, mu/(C*L^2))");
}

inline double apply_scale(StepScale s, double C, const Scales& sc) {
    switch (s) {
        case StepScale::raw: return C;
        case StepScale::c_over_L: return C / sc.L;
        case StepScale::inv_cL: return 1.0 / (C * sc.L);
        case StepScale::c_mu_over_L2: return C * sc.mu / (sc.L * sc.L);
        case StepScale::mu_over_cL2: return sc.mu / (C * sc.L * sc.L);
    }
    return C;
}

struct GridSpec {
    Algo algo = Algo::SimGDA;
    StepScale scale = StepScale::raw;
    std::vector<double> C{1.0};
    std::vector<double> C1;  // EG/OGD second step, same scale; empty = default
    std::vector<double> gamma{1.0};
    std::vector<double> delta{1.0};
    std::vector<double> m_x{0.0};
    std::vector<double> m_y{0.0};
    bool tie_momentum = true;
};

inline GridSpec grid_from_json(const json& j) {
    if (!j.is_object() || !j.contains("algo") || !j.at("algo").is_string()) throw spec_error("grid entry needs 'algo'");
    GridSpec g;
    const auto a = parse_algo(j.at("algo").get<std::string>());
    if (!a) throw spec_error("unknown algorithm '" + j.at("algo").get<std::string>() + "'");
    g.algo = *a;
    g.scale = parse_scale(j.value("scale", std::string("C")));
    if (!j.contains("C")) throw spec_error("grid entry needs a 'C' axis");
    g.C = axis_from_json(j.at("C"), "C");
    if (j.contains("C1")) g.C1 = axis_from_json(j.at("C1"), "C1");
    if (j.contains("gamma")) g.gamma = axis_from_json(j.at("gamma"), "gamma");
    if (j.contains("delta")) g.delta = axis_from_json(j.at("delta"), "delta");
    if (j.contains("m")) {
        g.m_x = axis_from_json(j.at("m"), "m");
        g.tie_momentum = true;
    } else if (j.contains("m_x") || j.contains("m_y")) {
        g.m_x = j.contains("m_x") ? axis_from_json(j.at("m_x"), "m_x") : std::vector<double>{0.0};
        g.m_y = j.contains("m_y") ? axis_from_json(j.at("m_y"), "m_y") : std::vector<double>{0.0};
        g.tie_momentum = false;
    }
    return g;
}

struct Candidate {
    AlgorithmConfig cfg;
    double C = 0.0;
    std::optional<double> C1;
};

// Enumeration order: C, C1, gamma, delta, m_x, m_y (outer to inner).
inline std::vector<Candidate> expand(const GridSpec& g, const Scales& sc) {
    std::vector<Candidate> out;
    const std::vector<std::optional<double>> c1s = [&] {
        std::vector<std::optional<double>> v;
        if (g.C1.empty()) v.push_back(std::nullopt);
        for (double c : g.C1) v.push_back(c);
        return v;
    }();
    const bool alex = is_alex(g.algo);
    const bool mom = is_momentum(g.algo);
    const std::vector<double> one{1.0};
    const auto& gammas = alex ? g.gamma : one;
    const auto& deltas = alex ? g.delta : one;
    const std::vector<double> zero{0.0};
    const auto& mxs = mom ? g.m_x : zero;
    const auto& mys = mom && !g.tie_momentum ? g.m_y : zero;
    for (double C : g.C)
        for (const auto& C1 : c1s)
            for (double ga : gammas)
                for (double de : deltas)
                    for (double mx : mxs)
                        for (double my : mys) {
                            Candidate c;
                            c.C = C;
                            c.C1 = C1;
                            c.cfg.algo = g.algo;
                            c.cfg.alpha = c.cfg.beta = apply_scale(g.scale, C, sc);
                            if (C1) c.cfg.alpha1 = c.cfg.beta1 = apply_scale(g.scale, *C1, sc);
                            c.cfg.gamma = ga;
                            c.cfg.delta = de;
                            c.cfg.m_x = mx;
                            c.cfg.m_y = (mom && g.tie_momentum) ? mx : my;
                            out.push_back(c);
                        }
    return out;
}

struct Instance {
    Game game;
    JointPoint z0;
    JointPoint nash;
};

inline Instance make_instance(Game g, JointPoint z0) {
    JointPoint zs = nash_equilibrium(g, z0);
    return {std::move(g), std::move(z0), std::move(zs)};
}

inline Eigen::Index game_dx(const Game& g) { return std::visit([](const auto& p) { return p.dx(); }, g); }
inline Eigen::Index game_dy(const Game& g) { return std::visit([](const auto& p) { return p.dy(); }, g); }

// "normal" draws from Rng(seed, stream); "ones" is the all-ones point; an object gives x and y.
inline JointPoint initial_point(const json& spec, const Game& g, std::uint64_t seed, std::uint64_t stream) {
    const auto dx = game_dx(g), dy = game_dy(g);
    if (spec.is_null() || (spec.is_string() && spec.get<std::string>() == "normal")) {
        Rng rng(seed, stream);
        JointPoint z{rng.normal_vec(dx), rng.normal_vec(dy)};
        return z;
    }
    if (spec.is_string() && spec.get<std::string>() == "ones") return {Vec::Ones(dx), Vec::Ones(dy)};
    if (spec.is_object() && spec.contains("x") && spec.contains("y")) {
        JointPoint z{io::vector_from_json(spec.at("x"), "z0.x"), io::vector_from_json(spec.at("y"), "z0.y")};
        if (z.x.size() != dx || z.y.size() != dy) throw spec_error("z0 dimensions do not match the problem");
        return z;
    }
    throw spec_error("z0 must be \"normal\", \"ones\" or {\"x\":[...],\"y\":[...]}");
}

enum class PointStatus { converged, not_converged, diverged, pruned };

inline const char* to_string(PointStatus s) {
    switch (s) {
        case PointStatus::converged: return "converged";
        case PointStatus::not_converged: return "not_converged";
        case PointStatus::diverged: return "diverged";
        case PointStatus::pruned: return "pruned";
    }
    return "?";
}

struct BenchmarkRow {
    Candidate candidate;
    PointStatus status = PointStatus::not_converged;
    bool converged = false;
    double mean_grad_calls = 0.0;
    double std_grad_calls = 0.0;
    std::vector<std::uint64_t> per_instance;
};

struct GridOptions {
    double eps = 1e-8;
    std::uint64_t max_grad_calls = 1000000;
    unsigned threads = 1;
    // points evaluated between budget updates; fixed so output does not depend on threads
    std::size_t chunk = 64;
    bool prune = true;
};

// Runs every candidate on every instance (in order). A candidate whose total
// gradient calls would exceed the best total from earlier chunks is stopped
// and marked pruned; it cannot be the minimizer.
inline BenchmarkRow evaluate(const Candidate& c, const std::vector<Instance>& inst, const GridOptions& opt,
                             std::uint64_t budget_total) {
    BenchmarkRow row;
    row.candidate = c;
    std::uint64_t total = 0;
    bool all = true;
    for (const auto& in : inst) {
        RunOptions ro;
        ro.eps = opt.eps;
        ro.max_iters = std::numeric_limits<std::uint64_t>::max();
        ro.max_grad_calls = opt.max_grad_calls;
        ro.record_trace = false;
        ro.nash = in.nash;
        bool budget_bound = false;
        if (budget_total != std::numeric_limits<std::uint64_t>::max()) {
            const std::uint64_t left = budget_total > total ? budget_total - total : 0;
            if (left < ro.max_grad_calls) {
                ro.max_grad_calls = std::max<std::uint64_t>(left, 1);
                budget_bound = true;
            }
        }
        const auto res = run(in.game, c.cfg, in.z0, ro);
        if (res.diverged) {
            row.status = PointStatus::diverged;
            all = false;
            break;
        }
        if (!res.converged) {
            row.status = budget_bound ? PointStatus::pruned : PointStatus::not_converged;
            all = false;
            break;
        }
        row.per_instance.push_back(res.grad_calls);
        total += res.grad_calls;
    }
    if (all) {
        row.status = PointStatus::converged;
        row.converged = true;
        const double n = static_cast<double>(row.per_instance.size());
        double mean = 0.0;
        for (auto v : row.per_instance) mean += static_cast<double>(v);
        mean /= n;
        double var = 0.0;
        for (auto v : row.per_instance) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
        row.mean_grad_calls = mean;
        row.std_grad_calls = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    }
    return row;
}

struct GridResult {
    std::vector<BenchmarkRow> rows;
    std::optional<std::size_t> best;
};

inline GridResult grid_search(const std::vector<Candidate>& cands, const std::vector<Instance>& inst,
                              const GridOptions& opt) {
    GridResult out;
    out.rows.resize(cands.size());
    std::uint64_t best_total = std::numeric_limits<std::uint64_t>::max();
    const std::size_t chunk = std::max<std::size_t>(1, opt.chunk);
    for (std::size_t lo = 0; lo < cands.size(); lo += chunk) {
        const std::size_t hi = std::min(cands.size(), lo + chunk);
        const std::uint64_t budget = opt.prune ? best_total : std::numeric_limits<std::uint64_t>::max();
        parallel_for(hi - lo, opt.threads, [&](std::size_t k) {
            out.rows[lo + k] = evaluate(cands[lo + k], inst, opt, budget);
        });
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& r = out.rows[i];
            if (!r.converged) continue;
            std::uint64_t total = 0;
            for (auto v : r.per_instance) total += v;
            // strict: ties keep the earlier (smaller C, then lexicographic) point
            if (!out.best || total < best_total) {
                best_total = total;
                out.best = i;
            }
        }
    }
    return out;
}

struct ScalingPoint {
    std::string algo;
    double kappa = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t grad_calls = 0;
    bool converged = false;
    bool diverged = false;
};

struct ScalingSpec {
    // "kappa_xy": mu_x = mu_y = mu, L_x = L_y = L, L_xy = kappa * mu
    // "kappa":    mu_x = mu_y = mu, L_x = L_y = L_xy = kappa * mu
    std::string family = "kappa_xy";
    double mu = 1.0;
    double L = 10.0;
    std::vector<double> kappas;
    std::vector<std::string> algos{"sim", "alt", "alex"};
    double gamma = 2.0;
    double delta = 2.0;
    double eps = 1e-20;
    std::uint64_t max_iters = 2000000000ULL;
};

inline ProblemParams scaling_params(const ScalingSpec& s, double kappa) {
    if (s.family == "kappa_xy") return ProblemParams::symmetric(s.mu, s.L, kappa * s.mu);
    if (s.family == "kappa") return ProblemParams::symmetric(s.mu, kappa * s.mu, kappa * s.mu);
    throw spec_error("unknown scaling family '" + s.family + "'");
}

inline theory::RatePrescription prescription_for(const std::string& algo, const ProblemParams& p, double gamma,
                                                 double delta) {
    if (algo == "sim") return theory::sim_prescription(p);
    if (algo == "alt") return theory::alt_prescription(p);
    if (algo == "alex") return theory::alex_prescription(p, gamma, delta);
    throw spec_error("scaling supports sim, alt and alex, not '" + algo + "'");
}

struct ScalingResult {
    std::vector<ScalingPoint> points;
    std::vector<std::pair<std::string, std::optional<double>>> slopes;
};

// Theory-prescribed runs on worst_case_6d from the all-ones point.
inline ScalingResult scaling_study(const ScalingSpec& s, unsigned threads = 1) {
    for (double k : s.kappas)
        if (!(k >= 4.0)) throw spec_error("scaling: kappa values must be >= 4");
    ScalingResult out;
    const std::size_t nk = s.kappas.size();
    out.points.resize(s.algos.size() * nk);
    for (const auto& a : s.algos) (void)prescription_for(a, scaling_params(s, 4.0), s.gamma, s.delta);
    parallel_for(out.points.size(), threads, [&](std::size_t i) {
        const auto& algo = s.algos[i / nk];
        const double kappa = s.kappas[i % nk];
        const auto p = scaling_params(s, kappa);
        const auto pr = prescription_for(algo, p, s.gamma, s.delta);
        AlgorithmConfig cfg;
        cfg.algo = *parse_algo(algo);
        cfg.alpha = pr.alpha;
        cfg.beta = pr.beta;
        cfg.gamma = s.gamma;
        cfg.delta = s.delta;
        const auto g = worst_case_6d(p);
        RunOptions ro;
        ro.eps = s.eps;
        ro.max_iters = s.max_iters;
        ro.record_trace = false;
        const auto res = run(g, cfg, JointPoint{Vec::Ones(3), Vec::Ones(3)}, ro);
        out.points[i] = {algo, kappa, res.iterations, res.grad_calls, res.converged, res.diverged};
    });
    for (std::size_t a = 0; a < s.algos.size(); ++a) {
        std::vector<double> xs, ys;
        for (std::size_t k = 0; k < nk; ++k) {
            const auto& pt = out.points[a * nk + k];
            if (!pt.converged) continue;
            xs.push_back(pt.kappa);
            ys.push_back(static_cast<double>(std::max<std::uint64_t>(pt.iterations, 1)));
        }
        out.slopes.emplace_back(s.algos[a], median_slope(xs, ys));
    }
    return out;
}

struct AlgoEntry {
    AlgorithmConfig cfg;
    // step sizes taken from the theory prescription (sim, alt, alex)
    bool prescribed = false;
};

struct ExperimentSpec {
    json problem;
    std::vector<AlgoEntry> algorithms;
    std::vector<GridSpec> grids;
    json z0;
    double eps = 1e-12;
    std::uint64_t max_iters = 100000;
    std::uint64_t max_grad_calls = 1000000;
    std::uint64_t repetitions = 1;
    std::uint64_t seed = 0;
    bool lyapunov = false;
    std::optional<double> mu_ref;
    std::optional<double> L_ref;
};

inline std::uint64_t count_at(const json& j, const char* key, std::uint64_t def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float() && v.get<double>() >= 1.0 && v.get<double>() < 1.8e19 &&
        std::floor(v.get<double>()) == v.get<double>())
        return static_cast<std::uint64_t>(v.get<double>());
    throw spec_error(std::string("'") + key + "' must be a positive integer");
}

inline AlgoEntry algo_entry_from_json(const json& j) {
    AlgoEntry e;
    if (j.is_object() && j.value("prescription", false)) {
        json k = j;
        k["alpha"] = 1.0;
        e.cfg = io::config_from_json(k);
        if (e.cfg.algo != Algo::SimGDA && e.cfg.algo != Algo::AltGDA && e.cfg.algo != Algo::AlexGDA)
            throw spec_error("prescription is available for sim, alt and alex only");
        e.prescribed = true;
        return e;
    }
    e.cfg = io::config_from_json(j);
    return e;
}

inline ExperimentSpec parse_experiment(const json& j) {
    if (!j.is_object()) throw spec_error("spec must be a JSON object");
    ExperimentSpec s;
    if (j.contains("problem")) s.problem = j.at("problem");
    if (j.contains("algorithms")) {
        if (!j.at("algorithms").is_array() || j.at("algorithms").empty())
            throw spec_error("'algorithms' must be a non-empty array");
        for (const auto& a : j.at("algorithms")) s.algorithms.push_back(algo_entry_from_json(a));
    }
    if (j.contains("algorithm")) s.algorithms.push_back(algo_entry_from_json(j.at("algorithm")));
    if (j.contains("grids")) {
        if (!j.at("grids").is_array() || j.at("grids").empty()) throw spec_error("'grids' must be a non-empty array");
        for (const auto& g : j.at("grids")) s.grids.push_back(grid_from_json(g));
    }
    if (j.contains("z0")) s.z0 = j.at("z0");
    if (j.contains("eps")) s.eps = io::number_at(j, "eps");
    if (!(s.eps > 0.0)) throw spec_error("'eps' must be positive");
    s.max_iters = count_at(j, "max_iters", s.max_iters);
    s.max_grad_calls = count_at(j, "max_grad_calls", s.max_grad_calls);
    s.repetitions = count_at(j, "repetitions", s.repetitions);
    if (s.max_iters == 0 || s.max_grad_calls == 0 || s.repetitions == 0)
        throw spec_error("max_iters, max_grad_calls and repetitions must be positive");
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw spec_error("'seed' must be a non-negative integer");
        s.seed = v.get<std::uint64_t>();
    }
    s.lyapunov = j.value("lyapunov", false);
    if (j.contains("mu_ref")) s.mu_ref = io::number_at(j, "mu_ref");
    if (j.contains("L_ref")) s.L_ref = io::number_at(j, "L_ref");
    return s;
}

inline Game spec_game(const ExperimentSpec& s, std::uint64_t rep) {
    if (s.problem.is_null()) throw spec_error("spec needs a 'problem'");
    json p = s.problem;
    if (p.is_object() && p.contains("generator") && !p.contains("seed")) p["seed"] = s.seed;
    return io::game_from_json(p, rep);
}

// Scale references: mu = min(mu_x, mu_y, mu_xy), L = max(L_x, L_y, L_xy), unless given.
inline Scales spec_scales(const ExperimentSpec& s, const Game& g) {
    Scales sc = scales_of(g);
    if (s.problem.is_object() && s.problem.contains("generator") && s.problem.at("generator").contains("mu_xy"))
        sc.mu = std::min(sc.mu, io::number_at(s.problem.at("generator"), "mu_xy"));
    if (s.mu_ref) sc.mu = *s.mu_ref;
    if (s.L_ref) sc.L = *s.L_ref;
    return sc;
}

inline AlgorithmConfig resolve(const AlgoEntry& e, const Game& g) {
    if (!e.prescribed) return e.cfg;
    const auto* q = std::get_if<QuadraticGame>(&g);
    if (!q) throw spec_error("prescribed step sizes need a quadratic problem");
    AlgorithmConfig c = e.cfg;
    const auto pr = prescription_for(to_string(c.algo), q->params(), c.gamma, c.delta);
    c.alpha = pr.alpha;
    c.beta = pr.beta;
    return c;
}

inline std::optional<LyapunovKind> lyapunov_for(const Game& g, const AlgorithmConfig& c) {
    const auto* q = std::get_if<QuadraticGame>(&g);
    if (!q) return std::nullopt;
    LyapunovKind k;
    switch (c.algo) {
        case Algo::SimGDA: k.kind = LyapunovKind::Type::Sim; break;
        case Algo::AltGDA: k.kind = LyapunovKind::Type::Alt; break;
        case Algo::AlexGDA: k.kind = LyapunovKind::Type::Alex; break;
        default: return std::nullopt;
    }
    k.alpha = c.alpha;
    k.beta = c.beta;
    k.gamma = c.gamma;
    k.delta = c.delta;
    k.params = q->params();
    try {
        k.validate();
    } catch (const domain_error&) {
        return std::nullopt;
    }
    return k;
}

inline std::filesystem::path ensure_dir(const std::string& out) {
    std::filesystem::path p(out.empty() ? "." : out);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec || !std::filesystem::is_directory(p)) throw io::io_error("cannot create output directory '" + p.string() + "'");
    return p;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::io_error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw io::io_error("write failed for '" + path.string() + "'");
}

// One trace CSV per (repetition, algorithm) plus summary.json.
inline json cmd_run(const ExperimentSpec& s, const std::string& out, unsigned threads = 1) {
    if (s.algorithms.empty()) throw spec_error("run needs 'algorithms'");
    const auto dir = ensure_dir(out);
    const std::size_t na = s.algorithms.size();
    const std::size_t n = static_cast<std::size_t>(s.repetitions) * na;
    std::vector<Game> games;
    std::vector<JointPoint> starts;
    for (std::uint64_t r = 0; r < s.repetitions; ++r) {
        games.push_back(spec_game(s, r));
        starts.push_back(initial_point(s.z0, games.back(), s.seed, r));
    }
    std::vector<json> rows(n);
    std::vector<std::string> csv(n);
    std::vector<std::string> names(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const std::size_t r = i / na, a = i % na;
        const auto cfg = resolve(s.algorithms[a], games[r]);
        RunOptions ro;
        ro.eps = s.eps;
        ro.max_iters = s.max_iters;
        if (s.lyapunov) ro.lyapunov = lyapunov_for(games[r], cfg);
        const auto res = run(games[r], cfg, starts[r], ro);
        std::ostringstream os;
        io::write_trace_csv(os, res.trace);
        csv[i] = os.str();
        names[i] = "trace_r" + std::to_string(r) + "_a" + std::to_string(a) + "_" + to_string(cfg.algo) + ".csv";
        rows[i] = {{"repetition", r},
                   {"index", a},
                   {"config", io::to_json(cfg)},
                   {"file", names[i]},
                   {"converged", res.converged},
                   {"diverged", res.diverged},
                   {"iterations", res.iterations},
                   {"grad_calls", res.grad_calls},
                   {"final_dist_sq", res.final_dist_sq}};
    });
    for (std::size_t i = 0; i < n; ++i) write_text(dir / names[i], csv[i]);
    json summary{{"runs", rows}, {"eps", s.eps}, {"max_iters", s.max_iters}, {"seed", s.seed}};
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

inline json row_to_json(const BenchmarkRow& r) {
    json j{{"algo", to_string(r.candidate.cfg.algo)},
           {"config", io::to_json(r.candidate.cfg)},
           {"C", r.candidate.C},
           {"status", to_string(r.status)},
           {"converged", r.converged}};
    if (r.candidate.C1) j["C1"] = *r.candidate.C1;
    if (r.converged) {
        j["grad_complexity"] = {{"mean", r.mean_grad_calls}, {"std", r.std_grad_calls}};
        j["per_instance"] = r.per_instance;
    } else {
        j["grad_complexity"] = nullptr;
    }
    return j;
}

inline std::string grid_csv(const GridResult& g) {
    std::ostringstream os;
    os << "index,algo,C,C1,alpha,beta,alpha1,beta1,gamma,delta,m_x,m_y,status,mean_grad_calls,std_grad_calls\n";
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        const auto& r = g.rows[i];
        const auto& c = r.candidate.cfg;
        os << i << ',' << to_string(c.algo) << ',' << io::fmt17(r.candidate.C) << ','
           << (r.candidate.C1 ? io::fmt17(*r.candidate.C1) : std::string()) << ',' << io::fmt17(c.alpha) << ','
           << io::fmt17(c.beta) << ',' << io::fmt17(c.alpha_1()) << ',' << io::fmt17(c.beta_1()) << ','
           << io::fmt17(c.gamma) << ',' << io::fmt17(c.delta) << ',' << io::fmt17(c.m_x) << ',' << io::fmt17(c.m_y)
           << ',' << to_string(r.status) << ',';
        if (r.converged) os << io::fmt17(r.mean_grad_calls) << ',' << io::fmt17(r.std_grad_calls);
        else os << ',';
        os << '\n';
    }
    return os.str();
}

struct GridReport {
    std::vector<GridResult> results;
    json best;
};

inline std::vector<Instance> spec_instances(const ExperimentSpec& s) {
    std::vector<Instance> inst;
    for (std::uint64_t r = 0; r < s.repetitions; ++r) {
        Game g = spec_game(s, r);
        JointPoint z0 = initial_point(s.z0, g, s.seed, r);
        inst.push_back(make_instance(std::move(g), std::move(z0)));
    }
    return inst;
}

// Grid search per entry; best.json lists the winner (or a no-convergence note) per entry.
inline GridReport cmd_grid(const ExperimentSpec& s, const std::string& out, unsigned threads = 1) {
    if (s.grids.empty()) throw spec_error("grid needs 'grids'");
    const auto inst = spec_instances(s);
    const Scales sc = spec_scales(s, inst.front().game);
    GridOptions opt;
    opt.eps = s.eps;
    opt.max_grad_calls = s.max_grad_calls;
    opt.threads = threads;
    GridReport rep;
    rep.best = json::array();
    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
        const auto cands = expand(s.grids[gi], sc);
        auto res = grid_search(cands, inst, opt);
        files.emplace_back("grid_" + std::to_string(gi) + "_" + to_string(s.grids[gi].algo) + ".csv", grid_csv(res));
        if (res.best) {
            rep.best.push_back(row_to_json(res.rows[*res.best]));
        } else {
            rep.best.push_back({{"algo", to_string(s.grids[gi].algo)},
                                {"converged", false},
                                {"message", "no convergent config"}});
        }
        rep.results.push_back(std::move(res));
    }
    if (!out.empty()) {
        const auto dir = ensure_dir(out);
        for (const auto& [name, text] : files) write_text(dir / name, text);
        json j{{"best", rep.best}, {"eps", s.eps}, {"repetitions", s.repetitions}, {"seed", s.seed}};
        write_text(dir / "best.json", j.dump(2) + "\n");
    }
    return rep;
}

inline ScalingSpec scaling_from_json(const json& j) {
    if (!j.is_object()) throw spec_error("spec must be a JSON object");
    ScalingSpec s;
    s.family = j.value("family", s.family);
    if (j.contains("mu")) s.mu = io::number_at(j, "mu");
    if (j.contains("L")) s.L = io::number_at(j, "L");
    if (!j.contains("kappas")) throw spec_error("scaling needs 'kappas'");
    s.kappas = axis_from_json(j.at("kappas"), "kappas");
    if (j.contains("algos")) s.algos = j.at("algos").get<std::vector<std::string>>();
    if (j.contains("gamma")) s.gamma = io::number_at(j, "gamma");
    if (j.contains("delta")) s.delta = io::number_at(j, "delta");
    if (j.contains("eps")) s.eps = io::number_at(j, "eps");
    if (!(s.eps > 0.0)) throw spec_error("'eps' must be positive");
    s.max_iters = count_at(j, "max_iters", s.max_iters);
    (void)scaling_params(s, 4.0);
    return s;
}

inline json cmd_scaling(const ScalingSpec& s, const std::string& out, unsigned threads = 1) {
    const auto res = scaling_study(s, threads);
    std::ostringstream os;
    os << "algo,kappa,iterations,grad_calls,converged,diverged\n";
    json pts = json::array();
    for (const auto& p : res.points) {
        os << p.algo << ',' << io::fmt17(p.kappa) << ',' << p.iterations << ',' << p.grad_calls << ','
           << (p.converged ? "true" : "false") << ',' << (p.diverged ? "true" : "false") << '\n';
        pts.push_back({{"algo", p.algo},
                       {"kappa", p.kappa},
                       {"iterations", p.iterations},
                       {"grad_calls", p.grad_calls},
                       {"converged", p.converged},
                       {"excluded", !p.converged}});
    }
    json slopes = json::object();
    for (const auto& [a, v] : res.slopes) slopes[a] = v ? json(*v) : json(nullptr);
    json j{{"family", s.family}, {"points", pts}, {"median_slope", slopes}};
    if (!out.empty()) {
        const auto dir = ensure_dir(out);
        write_text(dir / "scaling.csv", os.str());
        write_text(dir / "scaling.json", j.dump(2) + "\n");
    }
    return j;
}

inline json cmd_spectral(const ExperimentSpec& s, const std::string& out) {
    if (s.algorithms.empty()) throw spec_error("spectral needs 'algorithm' or 'algorithms'");
    const Game g = spec_game(s, 0);
    json reports = json::array();
    for (const auto& e : s.algorithms) {
        const auto cfg = resolve(e, g);
        json r = io::to_json(spectral::analyze(g, cfg));
        r["config"] = io::to_json(cfg);
        reports.push_back(r);
    }
    json j{{"reports", reports}};
    if (!out.empty()) write_text(ensure_dir(out) / "spectral.json", j.dump(2) + "\n");
    return j;
}

// Worst spectral radius of Alex-GDA over singular values in [mu_xy, L_xy].
inline double bilinear_rate(double L_xy, double mu_xy, double alpha_beta, double gamma, double delta) {
    constexpr int n = 65;
    Vec s(n);
    for (int i = 0; i < n; ++i)
        s[i] = mu_xy == L_xy ? L_xy : std::exp(std::log(mu_xy) + (std::log(L_xy) - std::log(mu_xy)) * i / (n - 1));
    const double a = std::sqrt(alpha_beta);
    return spectral::alex_bilinear_rho(BilinearGame(Mat(s.asDiagonal())), a, a, gamma, delta).spectral_radius;
}

inline json cmd_bilinear_opt(const json& j, const std::string& out) {
    if (!j.is_object()) throw spec_error("spec must be a JSON object");
    const double L = io::number_at(j, "L_xy");
    const double mu = io::number_at(j, "mu_xy");
    if (!(mu > 0.0) || !(mu <= L)) throw spec_error("need 0 < mu_xy <= L_xy");
    const double delta = j.contains("delta") ? io::number_at(j, "delta") : 1.0;
    json res;
    if (!j.contains("gamma") && delta == 1.0) {
        const auto t = theory::bilinear_optimal_delta1(L, mu);
        res = {{"convergent", true}, {"alpha_beta", t.alpha_beta}, {"gamma", t.gamma}, {"delta", t.delta}, {"rate", t.rate}};
    } else {
        const double gamma = j.contains("gamma") ? io::number_at(j, "gamma") : 2.0;
        const auto region = theory::bilinear_step_region(gamma, delta);
        if (!region.convergent) {
            res = {{"convergent", false}, {"gamma", gamma}, {"delta", delta}, {"message", "no convergent step size"}};
        } else {
            if (gamma < 1.0 || delta < 1.0) throw spec_error("prescribed step needs gamma, delta >= 1");
            const double C = theory::bilinear_cgd(gamma, delta);
            const double ab = 1.0 / (C * L * L);
            res = {{"convergent", true}, {"alpha_beta", ab},
                   {"gamma", gamma},     {"delta", delta},
                   {"C", C},             {"rate", bilinear_rate(L, mu, ab, gamma, delta)}};
        }
    }
    if (!out.empty()) write_text(ensure_dir(out) / "bilinear_opt.json", res.dump(2) + "\n");
    return res;
}

}  // namespace minimax::harness
