// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace enclosure {

enum class ErrorCode {
    obstacle_not_interior,
    nonpositive_radius,
    nonpositive_material,
    probe_touches_obstacle,
    probe_intersects_domain,
    invalid_probe,
    too_few_nodes,
    malformed_region,
    quadrature_not_converged,
    wrong_region,
    oracle_not_converged,
    evaluation_at_source,
    solver_failed,
    out_of_region,
    too_few_valid_samples,
    fit_degenerate,
    negative_distance,
    inconsistent_estimate,
    parse_error,
    validation_error,
    io_error,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace enclosure
