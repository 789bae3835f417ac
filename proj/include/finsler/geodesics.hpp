// Spray coefficients, formal Christoffel symbols, geodesic integration, and
// the reversibility criteria.
//
// Conventions: geodesics solve xdd^i + 2 G^i(x, xd) = 0. The spray is
// computed from the energy E = F^2 as
//     G^i = 1/4 g^{il} ( y^k d2E/dy^l dx^k - dE/dx^l ),
// which for b = 0 reduces to the Riemannian 1/2 Gamma^i_jk y^j y^k; the
// contraction of the formal Christoffel symbols gives the same values and is
// kept as an independent route for cross-checking.
#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/metric.hpp"
#include "finsler/one_forms.hpp"
#include "finsler/patch.hpp"
#include "finsler/report.hpp"

namespace finsler {

struct SprayCoefficients {
    Vec G;
};

// Rank-3 array with Gamma^i_jk layout.
class Tensor3 {
public:
    explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n, 0.0) {}
    int n() const { return n_; }
    double& operator()(int i, int j, int k) {
        return v_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
    }
    double operator()(int i, int j, int k) const {
        return v_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
    }

private:
    int n_;
    std::vector<double> v_;
};

// Gamma^i_jk(x,y) = g^{is}/2 (dg_sj/dx^k + dg_sk/dx^j - dg_jk/dx^s), with
// g^{is} applied through linear solves against g (no explicit inverse) and
// dg/dx from dual-number differentiation of the tensor pipeline.
inline Tensor3 formal_christoffel(const ManifoldPatch& p, const DirectionPoint& dp,
                                  MetricSign sign = MetricSign::forward) {
    int n = p.dim();
    Mat g = fundamental_tensor(p, dp, sign).g;
    std::vector<Mat> dg = fundamental_tensor_dx(p, dp, sign);
    Tensor3 gamma(n);
    for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
            Vec rhs(static_cast<std::size_t>(n));
            for (int s = 0; s < n; ++s)
                rhs[static_cast<std::size_t>(s)] =
                    0.5 * (dg[static_cast<std::size_t>(k)](s, j) +
                           dg[static_cast<std::size_t>(j)](s, k) -
                           dg[static_cast<std::size_t>(s)](j, k));
            Vec col = solve(g, rhs);
            for (int i = 0; i < n; ++i) {
                gamma(i, j, k) = col[static_cast<std::size_t>(i)];
                gamma(i, k, j) = col[static_cast<std::size_t>(i)];
            }
        }
    }
    return gamma;
}

inline SprayCoefficients spray_coefficients(const ManifoldPatch& p, const DirectionPoint& dp,
                                            MetricSign sign = MetricSign::forward) {
    int n = p.dim();
    Mat g = fundamental_tensor(p, dp, sign).g;
    Mat exy = energy_hess_xy(p, dp, sign);  // [k][l] = d2E/dx^k dy^l
    Vec ex = energy_grad_x(p, dp, sign);
    Vec rhs(static_cast<std::size_t>(n), 0.0);
    for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += dp.y[static_cast<std::size_t>(k)] * exy(k, l);
        rhs[static_cast<std::size_t>(l)] = s - ex[static_cast<std::size_t>(l)];
    }
    Vec u = solve(g, rhs);
    for (auto& v : u) v *= 0.25;
    return {u};
}

// Independent route: G^i = 1/2 Gamma^i_jk y^j y^k.
inline SprayCoefficients spray_via_christoffel(const ManifoldPatch& p, const DirectionPoint& dp,
                                               MetricSign sign = MetricSign::forward) {
    int n = p.dim();
    Tensor3 gamma = formal_christoffel(p, dp, sign);
    Vec G(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                s += gamma(i, j, k) * dp.y[static_cast<std::size_t>(j)] * dp.y[static_cast<std::size_t>(k)];
        G[static_cast<std::size_t>(i)] = 0.5 * s;
    }
    return {G};
}

// Spray of the reverse metric F(x, -y); satisfies Gr^i(x, y) = G^i(x, -y).
inline SprayCoefficients reverse_spray(const ManifoldPatch& p, const DirectionPoint& dp) {
    return spray_coefficients(p, dp, MetricSign::reverse);
}

// --- geodesic integration ------------------------------------------------

struct GeodesicNode {
    double t = 0.0;
    Vec x, y;
    double speed = 0.0;
};

struct GeodesicPath {
    std::vector<GeodesicNode> nodes;
    double step = 0.0;
    bool exited_domain = false;

    const GeodesicNode& back() const { return nodes.back(); }
};

// Classical fixed-step RK4 on (xd = y, yd = -2G(x,y)). Integration truncates
// at the last in-domain node if the trajectory leaves the box.
inline GeodesicPath integrate_geodesic(const ManifoldPatch& p, const Vec& x0, const Vec& y0,
                                       double t_end, int steps,
                                       MetricSign sign = MetricSign::forward) {
    detail::require_nonzero_direction(y0);
    if (steps < 1) throw Error("integrator needs at least one step");
    int n = p.dim();
    double h = t_end / steps;
    GeodesicPath path;
    path.step = h;
    path.nodes.reserve(static_cast<std::size_t>(steps) + 1);

    auto accel = [&](const Vec& x, const Vec& y) {
        Vec G = spray_coefficients(p, {x, y}, sign).G;
        for (auto& v : G) v *= -2.0;
        return G;
    };
    auto push = [&](double t, const Vec& x, const Vec& y) {
        path.nodes.push_back({t, x, y, metric_value(p, {x, y}, sign)});
    };

    Vec x = x0, y = y0;
    push(0.0, x, y);
    for (int s = 0; s < steps; ++s) {
        Vec k1x = y;
        Vec k1y = accel(x, y);
        Vec x2(static_cast<std::size_t>(n)), y2(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            x2[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * h * k1x[static_cast<std::size_t>(i)];
            y2[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + 0.5 * h * k1y[static_cast<std::size_t>(i)];
        }
        Vec k2x = y2;
        Vec k2y = accel(x2, y2);
        Vec x3(static_cast<std::size_t>(n)), y3(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            x3[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * h * k2x[static_cast<std::size_t>(i)];
            y3[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + 0.5 * h * k2y[static_cast<std::size_t>(i)];
        }
        Vec k3x = y3;
        Vec k3y = accel(x3, y3);
        Vec x4(static_cast<std::size_t>(n)), y4(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            x4[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + h * k3x[static_cast<std::size_t>(i)];
            y4[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + h * k3y[static_cast<std::size_t>(i)];
        }
        Vec k4x = y4;
        Vec k4y = accel(x4, y4);
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] += h / 6.0 *
                (k1x[static_cast<std::size_t>(i)] + 2 * k2x[static_cast<std::size_t>(i)] +
                 2 * k3x[static_cast<std::size_t>(i)] + k4x[static_cast<std::size_t>(i)]);
            y[static_cast<std::size_t>(i)] += h / 6.0 *
                (k1y[static_cast<std::size_t>(i)] + 2 * k2y[static_cast<std::size_t>(i)] +
                 2 * k3y[static_cast<std::size_t>(i)] + k4y[static_cast<std::size_t>(i)]);
        }
        if (!p.domain().contains(x)) {
            path.exited_domain = true;
            break;
        }
        push(h * (s + 1), x, y);
    }
    return path;
}

inline void path_to_csv(const GeodesicPath& path, std::ostream& out) {
    if (path.nodes.empty()) return;
    int n = static_cast<int>(path.nodes.front().x.size());
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= n; ++i) out << ",y" << i;
    out << ",speed\n";
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (const auto& node : path.nodes) {
        emit(node.t);
        for (double v : node.x) {
            out << ',';
            emit(v);
        }
        for (double v : node.y) {
            out << ',';
            emit(v);
        }
        out << ',';
        emit(node.speed);
        out << '\n';
    }
}

inline std::string path_csv(const GeodesicPath& path) {
    std::ostringstream ss;
    path_to_csv(path, ss);
    return ss.str();
}

// Rescales y to unit Finslerian speed F(x, y) = 1.
inline DirectionPoint unit_speed(const ManifoldPatch& p, const DirectionPoint& dp,
                                 MetricSign sign = MetricSign::forward) {
    double f = metric_value(p, dp, sign);
    return {dp.x, (1.0 / f) * dp.y};
}

// --- reversibility criteria ----------------------------------------------

// Left side of the projective-equivalence criterion: the derivative of
// dF/dy^i along the flow of the reverse spray, minus dF/dx^i. With
// phi_i = dF/dy^i and the flow (xd = y, yd = -2 Gr),
//   residual_i = y^k d2F/dx^k dy^i - 2 Gr^k d2F/dy^k dy^i - dF/dx^i.
inline Vec el_reversibility_residual(const ManifoldPatch& p, const DirectionPoint& dp) {
    int n = p.dim();
    Mat hxy = metric_hess_xy(p, dp);  // [k][i]
    Mat hyy = metric_hess_yy(p, dp);
    Vec fx = metric_grad_x(p, dp);
    Vec gr = reverse_spray(p, dp).G;
    Vec r(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            s += dp.y[static_cast<std::size_t>(k)] * hxy(k, i) -
                 2.0 * gr[static_cast<std::size_t>(k)] * hyy(k, i);
        r[static_cast<std::size_t>(i)] = s - fx[static_cast<std::size_t>(i)];
    }
    return r;
}

// Closed-form criterion: (1 + beta^3/(alpha^4+beta^4)^(3/4)) *
// (db_i/dx^j - db_j/dx^i) y^j. The scalar factor is dF/dbeta and cannot
// vanish for alpha > 0.
inline Vec closed_form_criterion(const ManifoldPatch& p, const DirectionPoint& dp) {
    int n = p.dim();
    double fb = dF_dbeta(p, dp);
    if (!(std::abs(fb) > 0.0)) throw Error("dF/dbeta vanished; metric data is degenerate");
    Mat omega = exterior_derivative(p, dp.x).omega;
    Vec r(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += omega(i, j) * dp.y[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = fb * s;
    }
    return r;
}

// --- trace comparison ------------------------------------------------------

namespace detail {

inline double point_segment_distance(const Vec& pt, const Vec& a, const Vec& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pt.size(); ++i) {
        double d = b[i] - a[i];
        num += (pt[i] - a[i]) * d;
        den += d * d;
    }
    double t = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < pt.size(); ++i) {
        double d = pt[i] - (a[i] + t * (b[i] - a[i]));
        s += d * d;
    }
    return std::sqrt(s);
}

inline double directed_hausdorff(const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (const auto& pt : from) {
        double best = 1e300;
        if (to.size() == 1) best = point_segment_distance(pt, to[0], to[0]);
        for (std::size_t s = 0; s + 1 < to.size(); ++s)
            best = std::min(best, point_segment_distance(pt, to[s], to[s + 1]));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace detail

// Symmetric Hausdorff distance between two polylines (nodes against the other
// polyline's segments).
inline double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    return std::max(detail::directed_hausdorff(a, b), detail::directed_hausdorff(b, a));
}

inline std::vector<Vec> trace_of(const GeodesicPath& path) {
    std::vector<Vec> pts;
    pts.reserve(path.nodes.size());
    for (const auto& node : path.nodes) pts.push_back(node.x);
    return pts;
}

// For each sample: integrate a geodesic, then integrate a second geodesic
// from its endpoint in the reversed direction (renormalized to unit speed)
// for the F-length of the reversed trace, and measure the symmetric Hausdorff
// distance between the two traces. Traces, not parametrizations: traversing
// the curve backwards reparametrizes it, so the return integration time is
// the reverse-metric length of the forward trace rather than t_end.
inline CheckReport trace_reversibility_defect(const ManifoldPatch& p,
                                              const std::vector<DirectionPoint>& samples,
                                              double t_end, int steps,
                                              double threshold = 1e-4) {
    CheckReport rep;
    rep.name = "trace-reversibility";
    rep.threshold = threshold;
    double worst = 0.0;
    long used = 0;
    for (const auto& sample : samples) {
        DirectionPoint start = unit_speed(p, sample);
        GeodesicPath fwd = integrate_geodesic(p, start.x, start.y, t_end, steps);
        if (fwd.nodes.size() < 2) continue;
        // reverse-metric length of the forward trace (trapezoid in t)
        double back_len = 0.0;
        for (std::size_t k = 0; k + 1 < fwd.nodes.size(); ++k) {
            double f0 = metric_value(p, {fwd.nodes[k].x, fwd.nodes[k].y}, MetricSign::reverse);
            double f1 = metric_value(p, {fwd.nodes[k + 1].x, fwd.nodes[k + 1].y}, MetricSign::reverse);
            back_len += 0.5 * (f0 + f1) * (fwd.nodes[k + 1].t - fwd.nodes[k].t);
        }
        const GeodesicNode& end = fwd.back();
        DirectionPoint back_start = unit_speed(p, {end.x, -1.0 * end.y});
        GeodesicPath bwd = integrate_geodesic(p, back_start.x, back_start.y, back_len, steps);
        double defect = hausdorff_distance(trace_of(fwd), trace_of(bwd));
        worst = std::max(worst, defect);
        ++used;
        std::string note = "sample " + std::to_string(used) + ": defect " + fmt_g(defect);
        if (fwd.exited_domain || bwd.exited_domain) note += " (trace truncated at domain exit)";
        rep.details.push_back(note);
    }
    rep.samples = used;
    rep.max_residual = worst;
    rep.pass = used > 0 && worst < threshold;
    return rep;
}

}  // namespace finsler
