// The 1-form b: exterior derivative, closedness scan, line integrals and
// potential reconstruction on the star-shaped patch domain.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"
#include "finsler/linalg.hpp"
#include "finsler/patch.hpp"
#include "finsler/report.hpp"

namespace finsler {

// omega_ij = db_i/dx^j - db_j/dx^i at a point; antisymmetric by construction
// (each unordered pair is computed once).
struct TwoFormValue {
    Mat omega;
};

namespace detail {

// Jacobian J_ij = db_i / dx^j by one dual evaluation per (i, j).
inline Mat b_jacobian(const ManifoldPatch& p, const Vec& x) {
    int n = p.dim();
    Mat jac(n);
    std::vector<D1> xs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m)
            xs[static_cast<std::size_t>(m)] = seed1(x[static_cast<std::size_t>(m)], m == j ? 1.0 : 0.0);
        for (int i = 0; i < n; ++i)
            jac(i, j) = der1(p.b_entry(i).eval<D1>(xs));
    }
    return jac;
}

}  // namespace detail

inline TwoFormValue exterior_derivative(const ManifoldPatch& p, const Vec& x) {
    int n = p.dim();
    Mat jac = detail::b_jacobian(p, x);
    Mat omega(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double w = jac(i, j) - jac(j, i);
            omega(i, j) = w;
            omega(j, i) = -w;
        }
    }
    return {omega};
}

// Scans |omega_ij| on a regular grid over the domain; passes iff the maximum
// stays below 1e-10 (exact derivatives, so the only noise is rounding).
inline CheckReport closedness_report(const ManifoldPatch& p, int grid_per_axis) {
    if (grid_per_axis < 2) throw Error("grid_per_axis must be at least 2");
    int n = p.dim();
    const Box& box = p.domain();
    CheckReport rep;
    rep.name = "closedness";
    rep.threshold = 1e-10;
    double max_w = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Vec x(static_cast<std::size_t>(n));
    long count = 0;
    for (;;) {
        for (int i = 0; i < n; ++i) {
            double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) / (grid_per_axis - 1);
            x[static_cast<std::size_t>(i)] = box.lo[static_cast<std::size_t>(i)] +
                                             t * (box.hi[static_cast<std::size_t>(i)] -
                                                  box.lo[static_cast<std::size_t>(i)]);
        }
        Mat omega = exterior_derivative(p, x).omega;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) max_w = std::max(max_w, std::abs(omega(i, j)));
        ++count;
        int k = 0;
        while (k < n && ++idx[static_cast<std::size_t>(k)] == grid_per_axis) {
            idx[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        if (k == n) break;
    }
    rep.samples = count;
    rep.max_residual = max_w;
    rep.pass = max_w < rep.threshold;
    rep.details.push_back("max |db_i/dx^j - db_j/dx^i| over " + std::to_string(count) +
                          " grid points: " + fmt_g(max_w));
    return rep;
}

// Composite 2-point Gauss-Legendre integral of b_i dx^i along a polyline.
// Exact for coefficients up to cubic along each segment.
inline double line_integral(const ManifoldPatch& p, const std::vector<Vec>& polyline) {
    int n = p.dim();
    if (polyline.size() < 2) return 0.0;
    static const double kNodes[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    double total = 0.0;
    Vec b;
    for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
        const Vec& a = polyline[s];
        const Vec& c = polyline[s + 1];
        for (double t : kNodes) {
            Vec x(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                x[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] +
                                                 t * (c[static_cast<std::size_t>(i)] -
                                                      a[static_cast<std::size_t>(i)]);
            b = p.b_at(x);
            double f = 0.0;
            for (int i = 0; i < n; ++i)
                f += b[static_cast<std::size_t>(i)] *
                     (c[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]);
            total += 0.5 * f;
        }
    }
    return total;
}

// V(x) = integral of b along the straight segment base -> x (subdivided for
// accuracy on non-polynomial coefficients). On a star-shaped domain a closed
// b is exact and grad V = b. Closedness is spot-checked at the endpoints and
// the midpoint; callers wanting a full guarantee should run closedness_report
// first.
inline double potential_from_closed(const ManifoldPatch& p, const Vec& base, const Vec& x,
                                    int subdivisions = 16) {
    int n = p.dim();
    for (const Vec* pt : {&base, &x}) {
        Mat omega = exterior_derivative(p, *pt).omega;
        double w = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) w = std::max(w, std::abs(omega(i, j)));
        if (w > 1e-10)
            throw NotClosedError("b is not closed here (|db| = " + fmt_g(w) +
                                 "); no potential exists");
    }
    {
        Vec mid(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            mid[static_cast<std::size_t>(i)] =
                0.5 * (base[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(i)]);
        Mat omega = exterior_derivative(p, mid).omega;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(omega(i, j)) > 1e-10)
                    throw NotClosedError("b is not closed on the segment; no potential exists");
    }
    std::vector<Vec> seg;
    seg.reserve(static_cast<std::size_t>(subdivisions) + 1);
    for (int k = 0; k <= subdivisions; ++k) {
        double t = static_cast<double>(k) / subdivisions;
        Vec pt(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            pt[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] +
                                              t * (x[static_cast<std::size_t>(i)] -
                                                   base[static_cast<std::size_t>(i)]);
        seg.push_back(std::move(pt));
    }
    return line_integral(p, seg);
}

}  // namespace finsler
