// Umbrella header.
#pragma once

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/flatness.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/one_forms.hpp"
#include "finsler/patch.hpp"
#include "finsler/patch_io.hpp"
#include "finsler/quasimetric.hpp"
#include "finsler/report.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

// Stable error-kind names for machine-readable error reports.
inline const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "parse-error";
    if (dynamic_cast<const EvalDomainError*>(&e)) return "eval-domain-error";
    if (dynamic_cast<const ConvexityError*>(&e)) return "convexity-error";
    if (dynamic_cast<const MetricPositivityError*>(&e)) return "metric-positivity-error";
    if (dynamic_cast<const InvalidDirectionError*>(&e)) return "invalid-direction";
    if (dynamic_cast<const NotClosedError*>(&e)) return "not-closed";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "non-convergence";
    if (dynamic_cast<const Error*>(&e)) return "error";
    return "internal-error";
}

}  // namespace finsler
