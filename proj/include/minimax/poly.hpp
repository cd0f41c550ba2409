#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace minimax::poly {

using cplx = std::complex<double>;

// Evaluate a monic polynomial z^n + c[n-1] z^(n-1) + ... + c[0] and its derivative.
inline void eval_monic(const std::vector<double>& c, cplx z, cplx& p, cplx& dp) {
    p = 1.0;
    dp = 0.0;
    for (auto i = c.size(); i-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[i];
    }
}

inline cplx newton_polish(const std::vector<double>& c, cplx z, int iters = 4) {
    cplx p, dp;
    eval_monic(c, z, p, dp);
    for (int k = 0; k < iters; ++k) {
        if (std::abs(dp) == 0.0) break;
        const cplx next = z - p / dp;
        cplx pn, dpn;
        eval_monic(c, next, pn, dpn);
        if (!(std::abs(pn) < std::abs(p))) break;
        z = next;
        p = pn;
        dp = dpn;
    }
    return z;
}

// Roots of z^3 + a2 z^2 + a1 z + a0 by the Cardano / trigonometric formulas.
inline std::array<cplx, 3> cubic_roots(double a2, double a1, double a0, double disc_tol = 1e-12) {
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double hq = 0.5 * q, tp = p / 3.0;
    const double disc = hq * hq + tp * tp * tp;
    const double scale = std::max({1.0, hq * hq, std::abs(tp * tp * tp)});

    std::array<cplx, 3> r;
    if (std::abs(disc) <= disc_tol * scale) {
        const double u = std::cbrt(-hq);
        r = {cplx(2.0 * u), cplx(-u), cplx(-u)};
    } else if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-hq - std::copysign(sq, hq));
        const double v = (u != 0.0) ? -tp / u : 0.0;
        const double re = -0.5 * (u + v), im = 0.5 * std::sqrt(3.0) * (u - v);
        r = {cplx(u + v), cplx(re, im), cplx(re, -im)};
    } else {
        const double m = 2.0 * std::sqrt(-tp);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double th = std::acos(arg) / 3.0;
        const double two_pi_3 = 2.0 * 3.14159265358979323846 / 3.0;
        r = {cplx(m * std::cos(th)), cplx(m * std::cos(th - two_pi_3)), cplx(m * std::cos(th - 2.0 * two_pi_3))};
    }

    const std::vector<double> c{a0, a1, a2};
    for (auto& z : r) {
        z -= shift;
        z = newton_polish(c, z);
    }
    return r;
}

// Aberth-Ehrlich simultaneous iteration for a monic real polynomial.
inline std::vector<cplx> monic_roots(const std::vector<double>& c, int max_iter = 500) {
    const std::size_t n = c.size();
    if (n == 0) return {};
    double bound = 0.0;
    for (double v : c) bound = std::max(bound, std::abs(v));
    const double radius = 0.5 * (1.0 + bound);

    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = 2.0 * 3.14159265358979323846 * (static_cast<double>(k) + 0.25) / static_cast<double>(n) + 0.4;
        z[k] = std::polar(radius, ang);
    }

    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cplx p, dp;
            eval_monic(c, z[k], p, dp);
            if (p == 0.0) continue;
            const cplx ratio = p / dp;
            cplx sum = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            const cplx w = ratio / (1.0 - ratio * sum);
            z[k] -= w;
            worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[k])));
        }
        if (worst < 1e-16) break;
    }
    for (auto& zk : z) zk = newton_polish(c, zk);
    return z;
}

inline std::vector<cplx> quartic_roots(double a3, double a2, double a1, double a0) {
    return monic_roots({a0, a1, a2, a3});
}

template <class Range>
double max_modulus(const Range& roots) {
    double m = 0.0;
    for (const auto& z : roots) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace minimax::poly
