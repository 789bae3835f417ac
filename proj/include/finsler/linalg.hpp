// Small dense linear algebra for the low-dimensional tensors this library
// manipulates (n is the patch dimension, typically 2 or 3).
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

using Vec = std::vector<double>;

class Mat {
public:
    Mat() : n_(0) {}
    explicit Mat(int n, double fill = 0.0) : n_(n), d_(static_cast<std::size_t>(n) * n, fill) {}

    int n() const { return n_; }
    double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }

    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    int n_;
    std::vector<double> d_;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}
inline Vec operator*(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline Vec matvec(const Mat& m, const Vec& v) {
    Vec r(static_cast<std::size_t>(m.n()), 0.0);
    for (int i = 0; i < m.n(); ++i)
        for (int j = 0; j < m.n(); ++j) r[static_cast<std::size_t>(i)] += m(i, j) * v[static_cast<std::size_t>(j)];
    return r;
}

// Attempts a Cholesky factorization; reports whether the matrix is SPD.
inline bool cholesky_spd(const Mat& a) {
    int n = a.n();
    Mat l(n);
    for (int j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        double lj = std::sqrt(diag);
        l(j, j) = lj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / lj;
        }
    }
    return true;
}

// Solves a x = rhs by LU with partial pivoting. Throws ConvexityError on a
// (numerically) singular matrix, which in this library always means the
// fundamental tensor or a(x) degenerated.
inline Vec solve(Mat a, Vec rhs) {
    int n = a.n();
    std::vector<int> piv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) piv[static_cast<std::size_t>(i)] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double bestv = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a(r, col));
            if (v > bestv) {
                best = r;
                bestv = v;
            }
        }
        if (!(bestv > 0.0) || !std::isfinite(bestv))
            throw ConvexityError("singular matrix in linear solve");
        if (best != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
            std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(best)]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = a(r, col) / a(col, col);
            a(r, col) = 0.0;
            for (int j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
            rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / a(i, i);
    }
    return x;
}

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline Vec eigenvalues_sym(Mat a) {
    int n = a.n();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vec ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    return ev;
}

inline double min_eigenvalue_sym(const Mat& a) {
    Vec ev = eigenvalues_sym(a);
    double m = ev[0];
    for (double v : ev)
        if (v < m) m = v;
    return m;
}

}  // namespace finsler
