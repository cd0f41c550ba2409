#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minimax/algorithms.hpp"
#include "minimax/lyapunov.hpp"
#include "minimax/problems.hpp"
#include "minimax/run.hpp"
#include "minimax/spectral.hpp"
#include "minimax/theory.hpp"

namespace minimax::io {

using json = nlohmann::json;

struct spec_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

// %.17g round-trips every double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Mat matrix_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.empty()) throw spec_error(std::string("matrix '") + name + "' must be a non-empty array of rows");
    if (!j[0].is_array() || j[0].empty()) throw spec_error(std::string("matrix '") + name + "' rows must be non-empty arrays");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
            throw spec_error(std::string("matrix '") + name + "' is ragged");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const auto& v = r[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw spec_error(std::string("matrix '") + name + "' has a non-numeric entry");
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

inline Vec vector_from_json(const json& j, const char* name) {
    if (!j.is_array()) throw spec_error(std::string("'") + name + "' must be an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw spec_error(std::string("'") + name + "' has a non-numeric entry");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline json vector_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json to_json(const ProblemParams& p) {
    return {{"mu_x", p.mu_x}, {"mu_y", p.mu_y}, {"L_x", p.L_x}, {"L_y", p.L_y}, {"L_xy", p.L_xy}};
}

inline double number_at(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw spec_error(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

inline ProblemParams params_from_json(const json& j) {
    if (!j.is_object()) throw spec_error("'params' must be an object");
    ProblemParams p;
    if (j.contains("mu") || j.contains("L")) {
        const double mu = number_at(j, "mu"), L = number_at(j, "L");
        p = ProblemParams::symmetric(mu, L, j.contains("L_xy") ? number_at(j, "L_xy") : L);
    } else {
        p.mu_x = number_at(j, "mu_x");
        p.mu_y = number_at(j, "mu_y");
        p.L_x = number_at(j, "L_x");
        p.L_y = number_at(j, "L_y");
        p.L_xy = number_at(j, "L_xy");
    }
    try {
        p.validate();
    } catch (const domain_error& e) {
        throw spec_error(e.what());
    }
    return p;
}

inline json to_json(const QuadraticGame& g) {
    json j{{"kind", to_string(g.kind())},
           {"A", matrix_to_json(g.A())},
           {"B", matrix_to_json(g.B())},
           {"C", matrix_to_json(g.C())},
           {"params", to_json(g.params())}};
    j["seed"] = g.seed() ? json(*g.seed()) : json(nullptr);
    return j;
}

inline json to_json(const BilinearGame& g) {
    return {{"kind", "bilinear"},
            {"B", matrix_to_json(g.B())},
            {"params", {{"L_xy", g.L_xy()}, {"mu_xy", g.mu_xy()}}},
            {"seed", nullptr}};
}

inline json to_json(const Game& g) {
    return std::visit([](const auto& p) { return to_json(p); }, g);
}

// Accepts explicit matrices, {"kind":"worstcase6d","params":...}, or a
// generator block {"kind":"quadratic","generator":{"dx","dy","mu_xy"},"params":...,"seed":n}.
inline Game game_from_json(const json& j, std::uint64_t seed_offset = 0) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw spec_error("problem needs a string 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    try {
        if (kind == "bilinear") {
            if (!j.contains("B")) throw spec_error("bilinear problem needs 'B'");
            return BilinearGame(matrix_from_json(j.at("B"), "B"));
        }
        if (kind == "worstcase6d") {
            if (!j.contains("params")) throw spec_error("worstcase6d needs 'params'");
            return worst_case_6d(params_from_json(j.at("params")));
        }
        if (kind == "quadratic") {
            if (j.contains("generator")) {
                const auto& gen = j.at("generator");
                if (!j.contains("params")) throw spec_error("generated quadratic needs 'params'");
                const auto p = params_from_json(j.at("params"));
                const auto dx = static_cast<Eigen::Index>(number_at(gen, "dx"));
                const auto dy = static_cast<Eigen::Index>(number_at(gen, "dy"));
                const double mu_xy = gen.contains("mu_xy") ? number_at(gen, "mu_xy") : p.L_xy;
                std::uint64_t seed = 0;
                if (j.contains("seed")) {
                    const auto& v = j.at("seed");
                    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                        throw spec_error("problem 'seed' must be a non-negative integer");
                    seed = v.get<std::uint64_t>();
                }
                return random_quadratic(dx, dy, p, mu_xy, seed + seed_offset);
            }
            for (const char* k : {"A", "B", "C"})
                if (!j.contains(k)) throw spec_error(std::string("quadratic problem needs '") + k + "'");
            return QuadraticGame(matrix_from_json(j.at("A"), "A"), matrix_from_json(j.at("B"), "B"),
                                 matrix_from_json(j.at("C"), "C"));
        }
    } catch (const spec_error&) {
        throw;
    } catch (const error& e) {
        throw spec_error(std::string("invalid problem: ") + e.what());
    }
    throw spec_error("unknown problem kind '" + kind + "'");
}

inline json to_json(const AlgorithmConfig& c) {
    json j{{"algo", to_string(c.algo)}, {"alpha", c.alpha}, {"beta", c.beta}};
    if (c.algo == Algo::EG || c.algo == Algo::OGD) {
        j["alpha1"] = c.alpha_1();
        j["beta1"] = c.beta_1();
    }
    if (is_alex(c.algo)) {
        j["gamma"] = c.gamma;
        j["delta"] = c.delta;
    }
    if (is_momentum(c.algo)) {
        j["m_x"] = c.m_x;
        j["m_y"] = c.m_y;
    }
    return j;
}

inline AlgorithmConfig config_from_json(const json& j) {
    if (!j.is_object() || !j.contains("algo") || !j.at("algo").is_string())
        throw spec_error("algorithm entry needs a string 'algo'");
    const auto a = parse_algo(j.at("algo").get<std::string>());
    if (!a) throw spec_error("unknown algorithm '" + j.at("algo").get<std::string>() + "'");
    AlgorithmConfig c;
    c.algo = *a;
    c.alpha = number_at(j, "alpha");
    c.beta = j.contains("beta") ? number_at(j, "beta") : c.alpha;
    if (j.contains("alpha1")) c.alpha1 = number_at(j, "alpha1");
    if (j.contains("beta1")) c.beta1 = number_at(j, "beta1");
    if (j.contains("gamma")) c.gamma = number_at(j, "gamma");
    if (j.contains("delta")) c.delta = number_at(j, "delta");
    if (j.contains("m_x")) c.m_x = number_at(j, "m_x");
    if (j.contains("m_y")) c.m_y = number_at(j, "m_y");
    if (j.contains("m")) c.m_x = c.m_y = number_at(j, "m");
    try {
        c.validate();
    } catch (const domain_error& e) {
        throw spec_error(e.what());
    }
    return c;
}

inline json to_json(const theory::RatePrescription& p, double psi0, double eps) {
    const auto K = p.complexity(psi0, eps);
    json k{{"psi0", psi0}, {"eps", eps}};
    k["K"] = K == std::numeric_limits<std::uint64_t>::max() ? json(nullptr) : json(K);
    return {{"algo", p.algo}, {"alpha", p.alpha}, {"beta", p.beta}, {"r", p.r}, {"A", p.A}, {"K_of", k}};
}

inline json to_json(const spectral::StabilityReport& r) {
    json roots = json::array();
    for (const auto& z : r.per_block_roots) roots.push_back({z.real(), z.imag()});
    return {{"spectral_radius", r.spectral_radius},
            {"method", spectral::to_string(r.method)},
            {"per_block_roots", roots},
            {"stable", r.stable}};
}

inline json to_json(const ContractionReport& r) {
    json j{{"kind", r.kind}, {"r", r.r}, {"holds", r.holds}, {"worst_ratio", r.worst_ratio}};
    j["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
    return j;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
    os << "iter,grad_calls,dist_sq,lyapunov\n";
    for (const auto& t : trace) {
        os << t.iter << ',' << t.grad_calls << ',' << fmt17(t.dist_sq) << ',';
        if (t.lyapunov) os << fmt17(*t.lyapunov);
        os << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    write_trace_csv(f, trace);
    if (!f) throw io_error("write failed for '" + path + "'");
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    f << j.dump(2) << '\n';
    if (!f) throw io_error("write failed for '" + path + "'");
}

inline json read_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw spec_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace minimax::io
