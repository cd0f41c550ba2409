#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "minimax/core.hpp"

namespace minimax::linalg {

struct SymEig {
    Vec values;   // ascending
    Mat vectors;  // columns
};

// Cyclic Jacobi for symmetric matrices.
inline SymEig jacobi_eig(const Mat& S, double tol = 1e-15, int max_sweeps = 100) {
    if (S.rows() != S.cols()) throw dimension_error("jacobi_eig: matrix is not square");
    const Eigen::Index n = S.rows();
    Mat a = 0.5 * (S + S.transpose());
    Mat v = Mat::Identity(n, n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < j; ++i) off += a(i, j) * a(i, j);
        if (off <= tol * tol * std::max(1e-300, a.squaredNorm())) break;

        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
    SymEig out{Vec(n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = a(idx[k], idx[k]);
        out.vectors.col(k) = v.col(idx[k]);
    }
    return out;
}

struct Svd {
    Mat U;     // m x r
    Vec s;     // r, descending
    Mat V;     // n x r
};

// One-sided (Hestenes) Jacobi. r = min(m, n).
inline Svd jacobi_svd(const Mat& B, double tol = 1e-15, int max_sweeps = 100) {
    const bool wide = B.rows() < B.cols();
    Mat w = wide ? Mat(B.transpose()) : B;
    const Eigen::Index m = w.rows(), n = w.cols();
    Mat v = Mat::Identity(n, n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = w.col(p).squaredNorm();
                const double beta = w.col(q).squaredNorm();
                const double gamma = w.col(p).dot(w.col(q));
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double wp = w(k, p), wq = w(k, q);
                    w(k, p) = c * wp - s * wq;
                    w(k, q) = s * wp + c * wq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vp = v(k, p), vq = v(k, q);
                    v(k, p) = c * vp - s * vq;
                    v(k, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Vec norms(n);
    for (Eigen::Index j = 0; j < n; ++j) norms[j] = w.col(j).norm();
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return norms[i] > norms[j]; });

    Svd out{Mat::Zero(m, n), Vec(n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto j = idx[k];
        out.s[k] = norms[j];
        out.V.col(k) = v.col(j);
        if (norms[j] > 0.0) out.U.col(k) = w.col(j) / norms[j];
    }
    if (wide) std::swap(out.U, out.V);
    return out;
}

inline double max_singular_value(const Mat& B) {
    if (B.size() == 0) return 0.0;
    return jacobi_svd(B).s[0];
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with diag(R) > 0.
inline Mat random_orthogonal(Eigen::Index n, Rng& rng) {
    const Mat g = rng.normal_mat(n, n);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i)
        if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    return q;
}

// Largest singular value by power iteration on M^T M.
inline double norm2(const Mat& M, int max_iter = 500, double tol = 1e-15) {
    const Eigen::Index n = M.cols();
    if (n == 0 || M.rows() == 0) return 0.0;
    Rng rng(0x9e3779b97f4a7c15ULL);
    Vec x = rng.normal_vec(n).normalized();
    double est = 0.0;
    Vec y(M.rows()), z(n);
    for (int it = 0; it < max_iter; ++it) {
        y.noalias() = M * x;
        z.noalias() = M.transpose() * y;
        const double zn = z.norm();
        if (zn == 0.0) return 0.0;
        const double next = std::sqrt(zn);
        x = z / zn;
        if (std::abs(next - est) <= tol * next) {
            est = next;
            break;
        }
        est = next;
    }
    return est;
}

}  // namespace minimax::linalg
