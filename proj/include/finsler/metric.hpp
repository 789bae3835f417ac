// The metric core: alpha, beta, the quartic Randers-change norm
// F = (alpha^4 + beta^4)^(1/4) + beta, its reverse, and the fundamental
// tensor g_ij(x,y) = 1/2 d2(F^2)/dy_i dy_j with every x/y-derivative the
// geometry modules need. All derivatives come from nested dual numbers; no
// finite differences enter the definition path.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"
#include "finsler/linalg.hpp"
#include "finsler/patch.hpp"

namespace finsler {

// forward evaluates F(x, y); reverse evaluates F(x, -y) = (a^4+b^4)^(1/4) - b.
enum class MetricSign { forward, reverse };

struct FundamentalTensor {
    Mat g;
    DirectionPoint at;
};

namespace detail {

inline void require_nonzero_direction(const Vec& y) {
    for (double v : y)
        if (v != 0.0) return;
    throw InvalidDirectionError("metric quantities are undefined at y = 0");
}

// alpha^2 = a_ij(x) y^i y^j as a T; throws if the value part is nonpositive
// for a nonzero y (a(x) not positive definite there).
template <class T>
T alpha_squared(const ManifoldPatch& p, std::span<const T> x, std::span<const T> y) {
    int n = p.dim();
    std::vector<T> A;
    p.eval_a(x, A);
    T a2(0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            T term = A[static_cast<std::size_t>(i) * n + j] * y[static_cast<std::size_t>(i)] *
                     y[static_cast<std::size_t>(j)];
            a2 = a2 + (i == j ? term : term + term);
        }
    }
    return a2;
}

template <class T>
T beta_value(const ManifoldPatch& p, std::span<const T> x, std::span<const T> y) {
    int n = p.dim();
    std::vector<T> B;
    p.eval_b(x, B);
    T s(0.0);
    for (int i = 0; i < n; ++i) s = s + B[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    return s;
}

}  // namespace detail

// F (or its reverse) evaluated with any scalar type. The quartic root is
// taken of alpha^4 + beta^4 = (a_ij y^i y^j)^2 + beta^4, which avoids an
// intermediate sqrt and stays smooth in y away from y = 0.
template <class T>
T metric_norm(const ManifoldPatch& p, std::span<const T> x, std::span<const T> y,
              MetricSign sign = MetricSign::forward) {
    T a2 = detail::alpha_squared(p, x, y);
    if (!(value_of(a2) > 0.0))
        throw ConvexityError("a_ij(x) y^i y^j is nonpositive; a(x) is not positive definite");
    T bv = detail::beta_value(p, x, y);
    T b2 = bv * bv;
    using std::pow;
    T q = pow(a2 * a2 + b2 * b2, 0.25);
    T f = (sign == MetricSign::forward) ? q + bv : q - bv;
    if (!(value_of(f) > 0.0))
        throw MetricPositivityError("metric value nonpositive (b too large for this metric)");
    return f;
}

namespace detail {

template <class T>
std::vector<T> lift(const Vec& v) {
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = T(v[i]);
    return out;
}

// span over a vector, shortening call sites below
template <class T>
std::span<const T> sp(const std::vector<T>& v) {
    return {v.data(), v.size()};
}

}  // namespace detail

inline double alpha(const ManifoldPatch& p, const DirectionPoint& dp) {
    detail::require_nonzero_direction(dp.y);
    double a2 = detail::alpha_squared<double>(p, detail::sp(dp.x), detail::sp(dp.y));
    if (!(a2 > 0.0))
        throw ConvexityError("a_ij(x) y^i y^j is nonpositive; a(x) is not positive definite");
    return std::sqrt(a2);
}

inline double beta(const ManifoldPatch& p, const DirectionPoint& dp) {
    return detail::beta_value<double>(p, detail::sp(dp.x), detail::sp(dp.y));
}

inline double metric_value(const ManifoldPatch& p, const DirectionPoint& dp,
                           MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    return metric_norm<double>(p, detail::sp(dp.x), detail::sp(dp.y), sign);
}

inline double F_value(const ManifoldPatch& p, const DirectionPoint& dp) {
    return metric_value(p, dp, MetricSign::forward);
}

inline double F_reverse(const ManifoldPatch& p, const DirectionPoint& dp) {
    return metric_value(p, dp, MetricSign::reverse);
}

// dF/dbeta = 1 + beta^3 / (alpha^4 + beta^4)^(3/4); strictly positive, used
// by the closed-form reversibility criterion.
inline double dF_dbeta(const ManifoldPatch& p, const DirectionPoint& dp) {
    double al = alpha(p, dp);
    double be = beta(p, dp);
    double a4b4 = al * al * al * al + be * be * be * be;
    return 1.0 + be * be * be / std::pow(a4b4, 0.75);
}

// --- first derivatives ------------------------------------------------

inline Vec metric_grad_x(const ManifoldPatch& p, const DirectionPoint& dp,
                         MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Vec g(static_cast<std::size_t>(n));
    auto ys = detail::lift<D1>(dp.y);
    for (int k = 0; k < n; ++k) {
        std::vector<D1> xs(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) xs[static_cast<std::size_t>(m)] = seed1(dp.x[static_cast<std::size_t>(m)], m == k ? 1.0 : 0.0);
        g[static_cast<std::size_t>(k)] = der1(metric_norm<D1>(p, detail::sp(xs), detail::sp(ys), sign));
    }
    return g;
}

inline Vec metric_grad_y(const ManifoldPatch& p, const DirectionPoint& dp,
                         MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Vec g(static_cast<std::size_t>(n));
    auto xs = detail::lift<D1>(dp.x);
    for (int i = 0; i < n; ++i) {
        std::vector<D1> ys(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) ys[static_cast<std::size_t>(m)] = seed1(dp.y[static_cast<std::size_t>(m)], m == i ? 1.0 : 0.0);
        g[static_cast<std::size_t>(i)] = der1(metric_norm<D1>(p, detail::sp(xs), detail::sp(ys), sign));
    }
    return g;
}

// --- second derivatives -----------------------------------------------

// [k][i] = d2 F / dx^k dy^i
inline Mat metric_hess_xy(const ManifoldPatch& p, const DirectionPoint& dp,
                          MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Mat h(n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            std::vector<D2> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m) {
                xs[static_cast<std::size_t>(m)] = seed2(dp.x[static_cast<std::size_t>(m)], m == k ? 1.0 : 0.0, 0.0);
                ys[static_cast<std::size_t>(m)] = seed2(dp.y[static_cast<std::size_t>(m)], 0.0, m == i ? 1.0 : 0.0);
            }
            h(k, i) = der12(metric_norm<D2>(p, detail::sp(xs), detail::sp(ys), sign));
        }
    }
    return h;
}

inline Mat metric_hess_yy(const ManifoldPatch& p, const DirectionPoint& dp,
                          MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Mat h(n);
    auto xs = detail::lift<D2>(dp.x);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            std::vector<D2> ys(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m)
                ys[static_cast<std::size_t>(m)] = seed2(dp.y[static_cast<std::size_t>(m)], m == i ? 1.0 : 0.0, m == j ? 1.0 : 0.0);
            double v = der12(metric_norm<D2>(p, detail::sp(xs), detail::sp(ys), sign));
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

// --- energy (F^2) derivatives used by the spray pipeline ----------------

inline double energy(const ManifoldPatch& p, const DirectionPoint& dp,
                     MetricSign sign = MetricSign::forward) {
    double f = metric_value(p, dp, sign);
    return f * f;
}

inline Vec energy_grad_x(const ManifoldPatch& p, const DirectionPoint& dp,
                         MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Vec g(static_cast<std::size_t>(n));
    auto ys = detail::lift<D1>(dp.y);
    for (int k = 0; k < n; ++k) {
        std::vector<D1> xs(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) xs[static_cast<std::size_t>(m)] = seed1(dp.x[static_cast<std::size_t>(m)], m == k ? 1.0 : 0.0);
        D1 f = metric_norm<D1>(p, detail::sp(xs), detail::sp(ys), sign);
        g[static_cast<std::size_t>(k)] = der1(f * f);
    }
    return g;
}

// [k][l] = d2(F^2) / dx^k dy^l
inline Mat energy_hess_xy(const ManifoldPatch& p, const DirectionPoint& dp,
                          MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Mat h(n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            std::vector<D2> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m) {
                xs[static_cast<std::size_t>(m)] = seed2(dp.x[static_cast<std::size_t>(m)], m == k ? 1.0 : 0.0, 0.0);
                ys[static_cast<std::size_t>(m)] = seed2(dp.y[static_cast<std::size_t>(m)], 0.0, m == l ? 1.0 : 0.0);
            }
            D2 f = metric_norm<D2>(p, detail::sp(xs), detail::sp(ys), sign);
            h(k, l) = der12(f * f);
        }
    }
    return h;
}

// --- fundamental tensor -------------------------------------------------

inline FundamentalTensor fundamental_tensor(const ManifoldPatch& p, const DirectionPoint& dp,
                                            MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    Mat g(n);
    auto xs = detail::lift<D2>(dp.x);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            std::vector<D2> ys(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m)
                ys[static_cast<std::size_t>(m)] = seed2(dp.y[static_cast<std::size_t>(m)], m == i ? 1.0 : 0.0, m == j ? 1.0 : 0.0);
            D2 f = metric_norm<D2>(p, detail::sp(xs), detail::sp(ys), sign);
            double v = 0.5 * der12(f * f);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return {g, dp};
}

// dg/dx^k for all k; result[k](i,j) = d g_ij / dx^k. Third-order nesting:
// y_i and y_j sit on the two inner dual levels, x_k on the outer one.
inline std::vector<Mat> fundamental_tensor_dx(const ManifoldPatch& p, const DirectionPoint& dp,
                                              MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(dp.y);
    int n = p.dim();
    std::vector<Mat> dg(static_cast<std::size_t>(n), Mat(n));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                std::vector<D3> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
                for (int m = 0; m < n; ++m) {
                    xs[static_cast<std::size_t>(m)] =
                        seed3(dp.x[static_cast<std::size_t>(m)], 0.0, 0.0, m == k ? 1.0 : 0.0);
                    ys[static_cast<std::size_t>(m)] =
                        seed3(dp.y[static_cast<std::size_t>(m)], m == i ? 1.0 : 0.0, m == j ? 1.0 : 0.0, 0.0);
                }
                D3 f = metric_norm<D3>(p, detail::sp(xs), detail::sp(ys), sign);
                double v = 0.5 * der123(f * f);
                dg[static_cast<std::size_t>(k)](i, j) = v;
                dg[static_cast<std::size_t>(k)](j, i) = v;
            }
        }
    }
    return dg;
}

// True iff the smallest eigenvalue of g(x,y) exceeds tol.
inline bool check_strong_convexity(const ManifoldPatch& p, const DirectionPoint& dp, double tol) {
    FundamentalTensor ft = fundamental_tensor(p, dp);
    return min_eigenvalue_sym(ft.g) > tol;
}

}  // namespace finsler
