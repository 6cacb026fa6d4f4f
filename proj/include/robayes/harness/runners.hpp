#pragma once

#include "robayes/harness/config.hpp"
#include "robayes/harness/report.hpp"

namespace robayes::harness {

Report run_consistency(const ExperimentConfig& cfg);
Report run_brittleness(const ExperimentConfig& cfg);
Report run_covering_bound(const ExperimentConfig& cfg);
Report run_growing_diameter(const ExperimentConfig& cfg);
Report run_misspecification_slice(const ExperimentConfig& cfg);
Report run_metric_validation(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind; fills metadata (config echo, seed, wall time).
Report run_experiment(const ExperimentConfig& cfg);

/// Schema and precondition checks only; returns the resolved parameters.
/// Throws ConfigError / PreconditionError exactly as the run would.
nlohmann::ordered_json validate_experiment(const ExperimentConfig& cfg);

}  // namespace robayes::harness
