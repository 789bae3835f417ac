// Projective flatness: the Hamel residual, the projective factor P(x,y), the
// spray defect G - P y, and the report combining them for F and its reverse.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "finsler/geodesics.hpp"
#include "finsler/metric.hpp"
#include "finsler/report.hpp"

namespace finsler {

struct FlatnessSample {
    DirectionPoint at;
    Vec hamel;      // Hamel residual of F at the sample
    Vec proj_defect;  // G - P y
    double P = 0.0;
};

// Hamel residual: d2F/dx^m dy^k y^m - dF/dx^k, zero everywhere iff all
// geodesics are straight coordinate lines. use_reverse evaluates it for the
// reverse metric instead.
inline Vec hamel_residual(const ManifoldPatch& p, const DirectionPoint& dp,
                          bool use_reverse = false) {
    MetricSign sign = use_reverse ? MetricSign::reverse : MetricSign::forward;
    int n = p.dim();
    Mat hxy = metric_hess_xy(p, dp, sign);  // [m][k] = d2F/dx^m dy^k
    Vec fx = metric_grad_x(p, dp, sign);
    Vec r(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += dp.y[static_cast<std::size_t>(m)] * hxy(m, k);
        r[static_cast<std::size_t>(k)] = s - fx[static_cast<std::size_t>(k)];
    }
    return r;
}

// P(x, y) = (dF/dx^k y^k) / (2F).
inline double projective_factor(const ManifoldPatch& p, const DirectionPoint& dp) {
    double f = metric_value(p, dp);
    Vec fx = metric_grad_x(p, dp);
    return 0.5 * dot(fx, dp.y) / f;
}

// G^i - P(x,y) y^i; the zero vector exactly when the spray is projectively
// trivial at the sample.
inline Vec projective_flat_defect(const ManifoldPatch& p, const DirectionPoint& dp) {
    Vec G = spray_coefficients(p, dp).G;
    double P = projective_factor(p, dp);
    Vec r(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) r[i] = G[i] - P * dp.y[i];
    return r;
}

inline FlatnessSample flatness_sample(const ManifoldPatch& p, const DirectionPoint& dp) {
    return {dp, hamel_residual(p, dp), projective_flat_defect(p, dp), projective_factor(p, dp)};
}

// Max Hamel residual for F and the reverse metric plus the max projective
// defect over the samples; pass iff everything stays below 1e-8 (exact
// derivatives, so flat constructions leave only rounding noise). When the
// caller provides the patch's trace-reversibility defect, the report also
// states the flatness => reversibility implication.
inline CheckReport flatness_report(const ManifoldPatch& p,
                                   const std::vector<DirectionPoint>& samples,
                                   std::optional<double> trace_defect = std::nullopt,
                                   double trace_threshold = 1e-4) {
    if (samples.empty()) throw Error("flatness_report needs at least one sample");
    CheckReport rep;
    rep.name = "projective-flatness";
    rep.threshold = 1e-8;
    double max_f = 0.0, max_rev = 0.0, max_defect = 0.0;
    for (const auto& dp : samples) {
        Vec hf = hamel_residual(p, dp, false);
        Vec hr = hamel_residual(p, dp, true);
        Vec pd = projective_flat_defect(p, dp);
        for (double v : hf) max_f = std::max(max_f, std::abs(v));
        for (double v : hr) max_rev = std::max(max_rev, std::abs(v));
        for (double v : pd) max_defect = std::max(max_defect, std::abs(v));
    }
    rep.samples = static_cast<long>(samples.size());
    rep.max_residual = std::max(max_f, max_rev);
    bool flat_f = max_f < rep.threshold;
    bool flat_rev = max_rev < rep.threshold;
    rep.pass = flat_f && flat_rev;
    rep.details.push_back("max Hamel residual (F): " + fmt_g(max_f));
    rep.details.push_back("max Hamel residual (reverse): " + fmt_g(max_rev));
    rep.details.push_back("max projective defect |G - P y|: " + fmt_g(max_defect));
    rep.details.push_back(std::string("F and reverse agree on flatness: ") +
                          ((flat_f == flat_rev) ? "yes" : "NO"));
    if (trace_defect) {
        if (flat_f) {
            bool reversible = *trace_defect < trace_threshold;
            rep.details.push_back(std::string("flat => reversible geodesics: trace defect ") +
                                  fmt_g(*trace_defect) + (reversible ? " (holds)" : " (VIOLATED)"));
            if (!reversible) rep.pass = false;
        } else {
            rep.details.push_back("flatness fails; reversibility implication is vacuous here");
        }
    }
    return rep;
}

}  // namespace finsler
