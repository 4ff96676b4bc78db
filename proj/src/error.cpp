// SPDX-License-Identifier: Apache-2.0
#include "enclosure/error.hpp"

namespace enclosure {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::obstacle_not_interior: return "obstacle-not-interior";
    case ErrorCode::nonpositive_radius: return "nonpositive-radius";
    case ErrorCode::nonpositive_material: return "nonpositive-material";
    case ErrorCode::probe_touches_obstacle: return "probe-touches-obstacle";
    case ErrorCode::probe_intersects_domain: return "probe-intersects-domain";
    case ErrorCode::invalid_probe: return "invalid-probe";
    case ErrorCode::too_few_nodes: return "too-few-nodes";
    case ErrorCode::malformed_region: return "malformed-region";
    case ErrorCode::quadrature_not_converged: return "quadrature-not-converged";
    case ErrorCode::wrong_region: return "wrong-region";
    case ErrorCode::oracle_not_converged: return "oracle-not-converged";
    case ErrorCode::evaluation_at_source: return "evaluation-at-source";
    case ErrorCode::solver_failed: return "solver-failed";
    case ErrorCode::out_of_region: return "out-of-region";
    case ErrorCode::too_few_valid_samples: return "too-few-valid-samples";
    case ErrorCode::fit_degenerate: return "fit-degenerate";
    case ErrorCode::negative_distance: return "negative-d";
    case ErrorCode::inconsistent_estimate: return "inconsistent-estimate";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::io_error: return "io-error";
    }
    return "unknown-error";
}

} // namespace enclosure
