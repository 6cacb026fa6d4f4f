#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robayes/bayes_engine.hpp"

namespace robayes::harness {

enum class ExperimentKind {
  kConsistency,
  kBrittleness,
  kCoveringBound,
  kGrowingDiameter,
  kMisspecificationSlice,
  kMetricValidation,
};

std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& s);

/// Either an explicit coordinate list or a regular linspace.
struct GridSpec {
  std::vector<double> coords;  // wins when nonempty
  double min = 0.0;
  double max = 1.0;
  std::size_t points = 0;

  std::vector<double> resolve() const;
};

/// A model together with the grid coordinates of its parameter nodes, kept
/// so scenario parameters given as values can be resolved to node indices.
struct BuiltModel {
  CategoricalModel model;
  std::vector<std::vector<double>> coords;
};

struct ModelSpec {
  std::string type;  // bernoulli_grid | categorical | product_bernoulli | gaussian_bins
  GridSpec grid;     // bernoulli_grid, gaussian_bins
  // categorical
  std::vector<std::vector<double>> coords;
  std::vector<std::vector<double>> likelihood;
  // product_bernoulli
  GridSpec theta1;
  GridSpec theta2;
  double base2 = 0.1;
  double slope2 = 1.0;
  // gaussian_bins
  double sigma = 0.25;
  std::size_t bins = 64;
  std::optional<double> x_min;
  std::optional<double> x_max;

  BuiltModel build() const;
  /// Same family on an explicit 1-d grid (growing-diameter runs).
  BuiltModel build_on_grid(const std::vector<double>& grid) const;
};

struct PriorSpec {
  std::string type = "uniform";  // uniform | dirac | weights | slice_uniform
  std::optional<std::size_t> index;  // dirac
  std::optional<double> value;       // dirac, resolved to the nearest node
  std::vector<double> weights;       // weights
  std::size_t slice_dim = 1;         // slice_uniform: coordinate axis
  double slice_value = 0.0;          // slice_uniform: axis value

  DiscreteMeasure build(const BuiltModel& built) const;
};

/// Scenario parameters; which fields are required depends on the kind.
struct PerturbationParams {
  std::optional<double> alpha;    // perturbation size
  std::optional<double> epsilon;  // evacuation / covering radius
  std::optional<double> rho;      // admissible TV ball radius
  std::optional<double> delta;    // robustness delta (defaults to rho)
  std::optional<std::vector<double>> theta;       // contamination anchor
  std::optional<std::vector<double>> theta_star;  // data-generating point
  std::optional<std::size_t> theta_index;
  std::optional<std::size_t> theta_star_index;
  double eps_bar = 0.45;         // brittleness verdict threshold
  double eps_prime = 0.02;       // slack subtracted from the covering gap target
  double gap_lower_bound = 0.0;  // misspecification: required persistent gap
};

struct DiagnosticsSpec {
  double neighborhood_radius = 0.05;  // radius of U around theta_star
  double conv_eps = 0.1;              // eps in the convergence fraction
  std::vector<double> kl_ladder = {1.0, 0.1, 0.01, 0.001};
  bool allow_inexact_covering = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kMetricValidation;
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::uint64_t experiment_id = 0;
  int threads = 0;  // 0 = hardware
  ModelSpec model;
  PriorSpec prior;
  PerturbationParams perturbation;
  DiagnosticsSpec diagnostics;
  std::vector<std::size_t> schedule;
  std::size_t replicates = 128;
  std::size_t seed_groups = 4;
  std::size_t max_grid_points = 512;  // dense-matrix budget
  std::vector<GridSpec> grids;  // growing_diameter only
  std::string output = ".";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::ordered_json to_json() const;

  /// Structural checks that need no model evaluation.
  void validate_shape() const;

  RngSeed rng_seed() const { return {seed, experiment_id}; }
};

/// Nearest node to a coordinate vector (Euclidean); ties take the lower index.
std::size_t nearest_node(const std::vector<std::vector<double>>& coords,
                         const std::vector<double>& target);

}  // namespace robayes::harness
