// SPDX-License-Identifier: Apache-2.0
//
// Flat key = value experiment configuration.
#pragma once

#include "enclosure/extraction.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace enclosure {

struct ExperimentConfig {
    Scene scene{{Vec3::Zero(), 1.0}, {Vec3(0.3, 0.0, 0.0), 0.2}, {1.0, 1.0}, 10.0};
    ProbeSpec probe = ProbeSpec::exterior(Vec3(2.0, 0.0, 0.0), 0.5, 4, Vec3::UnitZ());
    IndicatorOptions indicator;
    TauGrid grid;
    ExtractionOptions extraction;
    std::vector<double> thresholds; ///< T* values for the classifier
    std::string output_dir = "out";
    int verbosity = 1;
};

/// Parses and validates. Unset keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Every key with its effective value; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& config);

/// Re-checks scene, probe, solver and sweep invariants; throws validation_error naming the key.
void validate_config(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Shortest round-trip decimal form (at most 17 significant digits).
std::string format_number(double x);

} // namespace enclosure
