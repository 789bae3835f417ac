// The induced quasi-distance d_F, the generalized weight w_a, and the
// report-level checks: quasi-metric axioms, weightability, and orientation
// invariance of geodesic triangle perimeters.
//
// The distance solver is descent-first, shooting-second: a 33-node polyline
// is relaxed by gradient descent on total F-length (exact gradients through
// dual numbers), then a single-shooting Newton solve on the geodesic ODE
// refines the result. The directed 16-neighbor grid-graph oracle provides an
// independent upper bound for testing.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "finsler/geodesics.hpp"
#include "finsler/metric.hpp"
#include "finsler/one_forms.hpp"
#include "finsler/report.hpp"

namespace finsler {

enum class DistanceMethod { shooting, polyline_descent, graph_oracle };

inline const char* method_name(DistanceMethod m) {
    switch (m) {
        case DistanceMethod::shooting: return "shooting";
        case DistanceMethod::polyline_descent: return "polyline-descent";
        case DistanceMethod::graph_oracle: return "graph-oracle";
    }
    return "?";
}

struct DistanceResult {
    double value = 0.0;
    GeodesicPath path;
    DistanceMethod method = DistanceMethod::polyline_descent;
    bool converged = false;
};

struct DistanceOptions {
    int nodes = 33;                  // polyline nodes including both endpoints
    double descent_rel_tol = 1e-10;  // stop when relative improvement drops below
    int descent_max_iters = 300;
    int shoot_steps = 128;  // RK4 steps for the unit-time shooting flow
    int shoot_max_iters = 30;
    double shoot_tol = 1e-10;
};

struct WeightSample {
    Vec a;
    Vec x;
    double w = 0.0;
};

namespace detail {

// F-length of the straight segment [a, c] by 2-point Gauss-Legendre in the
// segment parameter. The integrand F(x(t), c - a) is parametrization
// invariant, so this is the exact contribution of the chord up to quadrature
// error.
template <class T>
T segment_f_length(const ManifoldPatch& p, const std::vector<T>& a, const std::vector<T>& c) {
    static const double kNodes[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    std::size_t n = a.size();
    std::vector<T> x(n), d(n);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = c[i] - a[i];
        d2 += value_of(d[i]) * value_of(d[i]);
    }
    if (d2 == 0.0) return T(0.0);  // collapsed segment contributes no length
    T total(0.0);
    for (double t : kNodes) {
        for (std::size_t i = 0; i < n; ++i) x[i] = a[i] + T(t) * d[i];
        total = total + metric_norm<T>(p, sp(x), sp(d)) * 0.5;
    }
    return total;
}

inline double polyline_f_length(const ManifoldPatch& p, const std::vector<Vec>& z) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < z.size(); ++s)
        total += segment_f_length<double>(p, z[s], z[s + 1]);
    return total;
}

inline void clamp_to_box(Vec& x, const Box& box) {
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
}

// Gradient of the discretized F-length with respect to one interior node,
// exact for the quadrature objective (dual numbers through both adjacent
// segments).
inline Vec node_gradient(const ManifoldPatch& p, const std::vector<Vec>& z, std::size_t k) {
    std::size_t n = z[k].size();
    Vec grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<D1> prev(n), node(n), next(n);
        for (std::size_t m = 0; m < n; ++m) {
            prev[m] = D1(z[k - 1][m]);
            next[m] = D1(z[k + 1][m]);
            node[m] = seed1(z[k][m], m == i ? 1.0 : 0.0);
        }
        D1 len = segment_f_length<D1>(p, prev, node) + segment_f_length<D1>(p, node, next);
        grad[i] = der1(len);
    }
    return grad;
}

struct ShootOutcome {
    bool ok = false;
    Vec y0;
    GeodesicPath path;
};

// Unit-time single shooting: find y0 with flow_x(1; x0, y0) = target. Newton
// with a finite-difference Jacobian, damped steps, and domain-exit rejection.
// The F-length of the solution is F(x0, y0) because spray flows have constant
// Finslerian speed.
inline ShootOutcome shoot(const ManifoldPatch& p, const Vec& x0, const Vec& target, Vec y0,
                          const DistanceOptions& opt) {
    int n = p.dim();
    auto flow = [&](const Vec& y, GeodesicPath* keep) -> std::pair<bool, Vec> {
        GeodesicPath path = integrate_geodesic(p, x0, y, 1.0, opt.shoot_steps);
        if (path.exited_domain) return {false, {}};
        if (keep) *keep = path;
        return {true, path.back().x};
    };
    double target_scale = 1.0;
    for (double v : target) target_scale = std::max(target_scale, std::abs(v));

    ShootOutcome out;
    auto [ok0, xe] = flow(y0, nullptr);
    if (!ok0) return out;
    Vec res = xe - target;
    double rnorm = norm2(res);
    for (int iter = 0; iter < opt.shoot_max_iters; ++iter) {
        if (rnorm < opt.shoot_tol * target_scale) {
            GeodesicPath path;
            auto [okf, xf] = flow(y0, &path);
            if (!okf) return out;
            out.ok = true;
            out.y0 = y0;
            out.path = std::move(path);
            return out;
        }
        // finite-difference Jacobian of the endpoint map
        Mat jac(n);
        bool jac_ok = true;
        for (int j = 0; j < n && jac_ok; ++j) {
            double h = 1e-6 * (1.0 + std::abs(y0[static_cast<std::size_t>(j)]));
            Vec yj = y0;
            yj[static_cast<std::size_t>(j)] += h;
            auto [okj, xj] = flow(yj, nullptr);
            if (!okj) {
                jac_ok = false;
                break;
            }
            for (int i = 0; i < n; ++i)
                jac(i, j) = (xj[static_cast<std::size_t>(i)] - xe[static_cast<std::size_t>(i)]) / h;
        }
        if (!jac_ok) return out;
        Vec step;
        try {
            step = solve(jac, res);
        } catch (const ConvexityError&) {
            return out;
        }
        // damped update
        bool improved = false;
        double damp = 1.0;
        for (int half = 0; half < 10; ++half) {
            Vec ytry = y0 - damp * step;
            auto [okt, xt] = flow(ytry, nullptr);
            if (okt) {
                Vec rtry = xt - target;
                double rt = norm2(rtry);
                if (rt < rnorm) {
                    y0 = ytry;
                    xe = xt;
                    res = rtry;
                    rnorm = rt;
                    improved = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if (!improved) return out;
    }
    if (rnorm < opt.shoot_tol * target_scale) {
        GeodesicPath path;
        auto [okf, xf] = flow(y0, &path);
        if (okf) {
            out.ok = true;
            out.y0 = y0;
            out.path = std::move(path);
        }
    }
    return out;
}

inline GeodesicPath polyline_as_path(const ManifoldPatch& p, const std::vector<Vec>& z) {
    GeodesicPath path;
    path.nodes.reserve(z.size());
    double t = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        Vec y = (k + 1 < z.size()) ? z[k + 1] - z[k] : z[k] - z[k - 1];
        double speed = metric_value(p, {z[k], y});
        path.nodes.push_back({t, z[k], y, speed});
        if (k + 1 < z.size()) t += segment_f_length<double>(p, z[k], z[k + 1]);
    }
    path.step = z.size() > 1 ? 1.0 / (static_cast<double>(z.size()) - 1) : 0.0;
    return path;
}

}  // namespace detail

// d_F(x, y): infimum of F-length over paths from x to y, computed by polyline
// descent refined by shooting. Never silently wrong: when neither stage
// converges the best value is returned with converged = false.
inline DistanceResult distance(const ManifoldPatch& p, const Vec& from, const Vec& to,
                               const DistanceOptions& opt = {}) {
    int n = p.dim();
    if (!p.domain().contains(from) || !p.domain().contains(to))
        throw Error("distance endpoints must lie in the patch domain");
    double coincide = 0.0;
    for (int i = 0; i < n; ++i)
        coincide = std::max(coincide, std::abs(from[static_cast<std::size_t>(i)] - to[static_cast<std::size_t>(i)]));
    if (coincide < 1e-12) {
        DistanceResult res;
        res.value = 0.0;
        res.converged = true;
        res.method = DistanceMethod::polyline_descent;
        return res;
    }

    // straight-segment initialization
    std::vector<Vec> z(static_cast<std::size_t>(opt.nodes));
    for (int k = 0; k < opt.nodes; ++k) {
        double t = static_cast<double>(k) / (opt.nodes - 1);
        Vec pt(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            pt[static_cast<std::size_t>(i)] = from[static_cast<std::size_t>(i)] +
                                              t * (to[static_cast<std::size_t>(i)] -
                                                   from[static_cast<std::size_t>(i)]);
        z[static_cast<std::size_t>(k)] = std::move(pt);
    }

    double len = detail::polyline_f_length(p, z);
    bool descent_converged = false;
    double step_scale = 1.0;
    for (int iter = 0; iter < opt.descent_max_iters; ++iter) {
        // gradient over interior nodes
        std::vector<Vec> grad(z.size(), Vec(static_cast<std::size_t>(n), 0.0));
        double gnorm2 = 0.0;
        for (std::size_t k = 1; k + 1 < z.size(); ++k) {
            grad[k] = detail::node_gradient(p, z, k);
            gnorm2 += dot(grad[k], grad[k]);
        }
        if (gnorm2 < 1e-28) {
            descent_converged = true;
            break;
        }
        // backtracking line search on the full node set
        double alpha = step_scale / std::sqrt(gnorm2);
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            std::vector<Vec> trial = z;
            for (std::size_t k = 1; k + 1 < trial.size(); ++k) {
                trial[k] = trial[k] - alpha * grad[k];
                detail::clamp_to_box(trial[k], p.domain());
            }
            double tl = detail::polyline_f_length(p, trial);
            if (tl < len - 1e-4 * alpha * gnorm2) {
                double rel = (len - tl) / std::max(1.0, len);
                z = std::move(trial);
                len = tl;
                improved = true;
                step_scale = std::min(1.0, alpha * std::sqrt(gnorm2) * 2.0);
                if (rel < opt.descent_rel_tol) descent_converged = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) {
            // no descent direction left at line-search resolution
            descent_converged = true;
            break;
        }
        if (descent_converged) break;
    }

    DistanceResult res;
    res.value = len;
    res.method = DistanceMethod::polyline_descent;
    res.converged = descent_converged;
    res.path = detail::polyline_as_path(p, z);

    // shooting refinement from the descent direction
    Vec dir = z[1] - z[0];
    double f0 = metric_value(p, {from, dir});
    Vec y0 = (len / f0) * dir;
    detail::ShootOutcome shot = detail::shoot(p, from, to, y0, opt);
    if (shot.ok) {
        double shot_len = metric_value(p, {from, shot.y0});
        // accept only if it refines the descent value rather than jumping to
        // a different extremal
        if (std::abs(shot_len - len) < 0.01 * len + 1e-6) {
            res.value = shot_len;
            res.method = DistanceMethod::shooting;
            res.path = std::move(shot.path);
            res.converged = true;
        }
    }
    return res;
}

// Directed shortest path in the 16-neighbor grid graph. Each edge costs the
// F-length of the straight edge segment (2-point Gauss quadrature at interior
// points of the edge; a single midpoint sample under-measures chord-optimal
// paths by more than the sandwich tolerance the tests demand). The lattice is
// aligned so that both query points are grid nodes and the chord direction is
// a lattice direction; margin cells around the query bounding box leave room
// for detours. Upper-bounds d_F and converges to it under grid refinement on
// convex patches.
inline double distance_oracle_grid(const ManifoldPatch& p, const Vec& from, const Vec& to,
                                   int grid_per_axis) {
    if (grid_per_axis < 16) throw Error("grid_per_axis must be at least 16");
    int n = p.dim();
    const Box& dom = p.domain();

    double max_span = 0.0;
    for (int i = 0; i < n; ++i)
        max_span = std::max(max_span, std::abs(to[static_cast<std::size_t>(i)] -
                                               from[static_cast<std::size_t>(i)]));
    if (max_span < 1e-12) return 0.0;

    int margin = std::max(2, grid_per_axis / 8);
    int core = grid_per_axis - 1 - 2 * margin;
    if (core < 1) throw Error("grid too coarse for the margin cells");

    std::vector<double> h(static_cast<std::size_t>(n));
    std::vector<double> origin(static_cast<std::size_t>(n));
    std::vector<int> count(static_cast<std::size_t>(n));
    std::vector<int> from_idx(static_cast<std::size_t>(n)), to_idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double qlo = std::min(from[static_cast<std::size_t>(i)], to[static_cast<std::size_t>(i)]);
        double qhi = std::max(from[static_cast<std::size_t>(i)], to[static_cast<std::size_t>(i)]);
        double span = qhi - qlo;
        double hi_step = (span > 0.0) ? span / core : max_span / core;
        // clip margins to the domain box
        int m_lo = std::min<double>(margin, std::floor((qlo - dom.lo[static_cast<std::size_t>(i)]) / hi_step + 1e-9));
        int m_hi = std::min<double>(margin, std::floor((dom.hi[static_cast<std::size_t>(i)] - qhi) / hi_step + 1e-9));
        m_lo = std::max(m_lo, 0);
        m_hi = std::max(m_hi, 0);
        int core_cells = (span > 0.0) ? core : 0;
        h[static_cast<std::size_t>(i)] = hi_step;
        origin[static_cast<std::size_t>(i)] = qlo - m_lo * hi_step;
        count[static_cast<std::size_t>(i)] = core_cells + m_lo + m_hi + 1;
        bool swapped = from[static_cast<std::size_t>(i)] > to[static_cast<std::size_t>(i)];
        from_idx[static_cast<std::size_t>(i)] = swapped ? m_lo + core_cells : m_lo;
        to_idx[static_cast<std::size_t>(i)] = swapped ? m_lo : m_lo + core_cells;
    }

    long total = 1;
    for (int i = 0; i < n; ++i) total *= count[static_cast<std::size_t>(i)];

    auto flat = [&](const std::vector<int>& idx) {
        long f = 0;
        for (int i = 0; i < n; ++i) f = f * count[static_cast<std::size_t>(i)] + idx[static_cast<std::size_t>(i)];
        return f;
    };
    auto coords = [&](long f) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = n - 1; i >= 0; --i) {
            idx[static_cast<std::size_t>(i)] = static_cast<int>(f % count[static_cast<std::size_t>(i)]);
            f /= count[static_cast<std::size_t>(i)];
        }
        return idx;
    };
    auto position = [&](const std::vector<int>& idx) {
        Vec x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] = origin[static_cast<std::size_t>(i)] +
                                             idx[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
        return x;
    };

    // neighbor offsets: all lattice steps with |o_i| <= 2, coprime components
    std::vector<std::vector<int>> offsets;
    {
        std::vector<int> o(static_cast<std::size_t>(n), -2);
        for (;;) {
            int g = 0;
            for (int v : o) g = std::gcd(g, std::abs(v));
            if (g == 1) offsets.push_back(o);
            int k = n - 1;
            while (k >= 0 && ++o[static_cast<std::size_t>(k)] == 3) {
                o[static_cast<std::size_t>(k)] = -2;
                --k;
            }
            if (k < 0) break;
        }
    }

    const double kInf = 1e300;
    std::vector<double> dist(static_cast<std::size_t>(total), kInf);
    std::vector<char> done(static_cast<std::size_t>(total), 0);
    using HeapItem = std::pair<double, long>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
    long src = flat(from_idx), dst = flat(to_idx);
    dist[static_cast<std::size_t>(src)] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (done[static_cast<std::size_t>(u)]) continue;
        done[static_cast<std::size_t>(u)] = 1;
        if (u == dst) break;
        std::vector<int> ui = coords(u);
        Vec ux = position(ui);
        for (const auto& off : offsets) {
            std::vector<int> vi = ui;
            bool inside = true;
            for (int i = 0; i < n; ++i) {
                vi[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
                if (vi[static_cast<std::size_t>(i)] < 0 ||
                    vi[static_cast<std::size_t>(i)] >= count[static_cast<std::size_t>(i)]) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            long v = flat(vi);
            if (done[static_cast<std::size_t>(v)]) continue;
            Vec delta(static_cast<std::size_t>(n)), vx(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                delta[static_cast<std::size_t>(i)] = off[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
                vx[static_cast<std::size_t>(i)] = ux[static_cast<std::size_t>(i)] +
                                                  delta[static_cast<std::size_t>(i)];
            }
            double w = detail::segment_f_length<double>(p, ux, vx);
            if (d + w < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = d + w;
                heap.push({d + w, v});
            }
        }
    }
    if (dist[static_cast<std::size_t>(dst)] >= kInf)
        throw Error("grid oracle found no path (degenerate grid)");
    return dist[static_cast<std::size_t>(dst)];
}

// w_a(x) = d_F(a, x) - d_F(x, a).
inline WeightSample weight(const ManifoldPatch& p, const Vec& a, const Vec& x,
                           const DistanceOptions& opt = {}) {
    DistanceResult fwd = distance(p, a, x, opt);
    DistanceResult bwd = distance(p, x, a, opt);
    if (!fwd.converged || !bwd.converged)
        throw ConvergenceError("distance solver did not converge while computing the weight");
    return {a, x, fwd.value - bwd.value};
}

namespace detail {

// Distance cache keyed by endpoint coordinates; reports below query the same
// points repeatedly.
class DistanceCache {
public:
    DistanceCache(const ManifoldPatch& p, const DistanceOptions& opt) : p_(p), opt_(opt) {}

    double operator()(const Vec& from, const Vec& to) {
        auto key = std::make_pair(from, to);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        DistanceResult res = distance(p_, from, to, opt_);
        if (!res.converged)
            throw ConvergenceError("distance solver did not converge during a report");
        cache_.emplace(std::move(key), res.value);
        return res.value;
    }

private:
    const ManifoldPatch& p_;
    DistanceOptions opt_;
    std::map<std::pair<Vec, Vec>, double> cache_;
};

}  // namespace detail

// Positivity, triangle inequality, and separation over sample triples.
inline CheckReport quasi_axioms_report(const ManifoldPatch& p,
                                       const std::vector<std::array<Vec, 3>>& triples,
                                       double tol = 1e-6, const DistanceOptions& opt = {}) {
    CheckReport rep;
    rep.name = "quasi-metric-axioms";
    rep.threshold = tol;
    detail::DistanceCache d(p, opt);
    double max_violation = 0.0;
    double max_triangle = 0.0;
    bool positivity_ok = true, separation_ok = true;
    for (const auto& tri : triples) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                const Vec &u = tri[static_cast<std::size_t>(i)], &v = tri[static_cast<std::size_t>(j)];
                double duv = d(u, v);
                double sep = 0.0;
                for (std::size_t c = 0; c < u.size(); ++c)
                    sep = std::max(sep, std::abs(u[c] - v[c]));
                if (sep >= 1e-12) {
                    if (!(duv > 0.0)) {
                        positivity_ok = false;
                        max_violation = std::max(max_violation, -duv + 1e-15);
                    }
                    if (!(duv > 0.0) && !(d(v, u) > 0.0)) separation_ok = false;
                } else {
                    max_violation = std::max(max_violation, std::abs(duv));
                }
                // triangle through the remaining vertex
                int k = 3 - i - j;
                double slack = duv - d(u, tri[static_cast<std::size_t>(k)]) -
                               d(tri[static_cast<std::size_t>(k)], v);
                max_triangle = std::max(max_triangle, slack);
            }
        }
    }
    rep.samples = static_cast<long>(triples.size());
    rep.max_residual = std::max(max_violation, max_triangle);
    rep.pass = positivity_ok && separation_ok && max_triangle <= tol && max_violation <= tol;
    rep.details.push_back(std::string("positivity: ") + (positivity_ok ? "ok" : "VIOLATED"));
    rep.details.push_back("max triangle slack: " + fmt_g(max_triangle));
    rep.details.push_back(std::string("separation: ") + (separation_ok ? "ok" : "VIOLATED"));
    return rep;
}

// Weightability of d_F with w = w_a on a closed patch: the axiom-4 residual,
// the symmetrized-distance identity, the weight bound, and agreement of w
// with twice the potential difference.
inline CheckReport weightability_report(const ManifoldPatch& p, const Vec& a,
                                        const std::vector<std::pair<Vec, Vec>>& pairs,
                                        double tol = 1e-4, const DistanceOptions& opt = {}) {
    if (!closedness_report(p, 9).pass)
        throw NotClosedError("weightability requires a closed 1-form b on the patch");
    CheckReport rep;
    rep.name = "weightability";
    rep.threshold = tol;
    detail::DistanceCache d(p, opt);
    auto w_of = [&](const Vec& x) { return d(a, x) - d(x, a); };
    const double slack_tol = 1e-6;
    double max_axiom4 = 0.0, max_sym_identity = 0.0, max_wpot = 0.0;
    double min_slack = 1e300, min_w = 1e300;
    for (const auto& [x, y] : pairs) {
        double dxy = d(x, y), dyx = d(y, x);
        double wx = w_of(x), wy = w_of(y);
        max_axiom4 = std::max(max_axiom4, std::abs(dxy + wx - dyx - wy));
        double rho = 0.5 * (dxy + dyx);
        max_sym_identity = std::max(max_sym_identity, std::abs(dxy - rho - 0.5 * (wy - wx)));
        min_slack = std::min(min_slack, rho - 0.5 * std::abs(wx - wy));
        double vx = potential_from_closed(p, a, x);
        double vy = potential_from_closed(p, a, y);
        max_wpot = std::max({max_wpot, std::abs(wx - 2.0 * vx), std::abs(wy - 2.0 * vy)});
        min_w = std::min({min_w, wx, wy});
    }
    rep.samples = static_cast<long>(pairs.size());
    rep.max_residual = std::max({max_axiom4, max_sym_identity, -min_slack});
    rep.pass = max_axiom4 < tol && max_sym_identity < tol && min_slack >= -slack_tol &&
               max_wpot < tol;
    rep.details.push_back("max |d(x,y) + w(x) - d(y,x) - w(y)|: " + fmt_g(max_axiom4));
    rep.details.push_back("max |d(x,y) - rho(x,y) - (w(y) - w(x))/2|: " + fmt_g(max_sym_identity));
    rep.details.push_back("min rho(x,y) - |w(x) - w(y)|/2 (must be >= -1e-06): " +
                          fmt_g(min_slack));
    rep.details.push_back("max |w_a(x) - 2(V(x) - V(a))|: " + fmt_g(max_wpot));
    rep.details.push_back("min w over samples (generalized weight may be negative): " +
                          fmt_g(min_w));
    return rep;
}

// Orientation invariance of geodesic triangle perimeters. Runs on any patch;
// when b is not closed the theorem precondition is violated, which the report
// states while still measuring the defect.
inline CheckReport triangle_orientation_report(const ManifoldPatch& p,
                                               const std::vector<std::array<Vec, 3>>& triples,
                                               double tol = 1e-4,
                                               const DistanceOptions& opt = {}) {
    CheckReport rep;
    rep.name = "triangle-orientation";
    rep.threshold = tol;
    bool closed = closedness_report(p, 9).pass;
    detail::DistanceCache d(p, opt);
    double max_defect = 0.0;
    for (const auto& tri : triples) {
        const Vec &x = tri[0], &y = tri[1], &z = tri[2];
        double fwd = d(x, y) + d(y, z) + d(z, x);
        double bwd = d(x, z) + d(z, y) + d(y, x);
        max_defect = std::max(max_defect, std::abs(fwd - bwd));
    }
    rep.samples = static_cast<long>(triples.size());
    rep.max_residual = max_defect;
    rep.pass = max_defect < tol;
    rep.details.push_back("max |perimeter(xyz) - perimeter(xzy)|: " + fmt_g(max_defect));
    if (!closed)
        rep.details.push_back("theorem precondition violated: b is not closed on this patch");
    return rep;
}

}  // namespace finsler
