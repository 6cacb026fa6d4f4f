#include "robayes/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

namespace robayes::harness {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConsistency: return "consistency";
    case ExperimentKind::kBrittleness: return "brittleness";
    case ExperimentKind::kCoveringBound: return "covering_bound";
    case ExperimentKind::kGrowingDiameter: return "growing_diameter";
    case ExperimentKind::kMisspecificationSlice: return "misspecification_slice";
    case ExperimentKind::kMetricValidation: return "metric_validation";
  }
  return "unknown";
}

ExperimentKind kind_from_string(const std::string& s) {
  if (s == "consistency") return ExperimentKind::kConsistency;
  if (s == "brittleness") return ExperimentKind::kBrittleness;
  if (s == "covering_bound") return ExperimentKind::kCoveringBound;
  if (s == "growing_diameter") return ExperimentKind::kGrowingDiameter;
  if (s == "misspecification_slice")
    return ExperimentKind::kMisspecificationSlice;
  if (s == "metric_validation") return ExperimentKind::kMetricValidation;
  throw ConfigError("unknown experiment kind: " + s);
}

std::vector<double> GridSpec::resolve() const {
  if (!coords.empty()) return coords;
  if (points == 0)
    throw ConfigError("grid needs either explicit coords or a point count");
  if (points == 1) return {min};
  if (!(max > min)) throw ConfigError("grid max must exceed min");
  std::vector<double> out;
  out.reserve(points);
  const double step = (max - min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i)
    out.push_back(i + 1 == points ? max : min + step * static_cast<double>(i));
  return out;
}

BuiltModel ModelSpec::build() const {
  if (type == "bernoulli_grid" || type == "gaussian_bins")
    return build_on_grid(grid.resolve());
  if (type == "categorical") {
    if (coords.empty() || likelihood.size() != coords.size())
      throw ConfigError("categorical model needs matching coords and likelihood rows");
    const std::size_t m = likelihood.front().size();
    std::vector<double> rows;
    rows.reserve(coords.size() * m);
    for (const auto& r : likelihood) {
      if (r.size() != m)
        throw ConfigError("likelihood rows must all have the same length");
      rows.insert(rows.end(), r.begin(), r.end());
    }
    return {CategoricalModel(build_grid_space(coords), m, std::move(rows)),
            coords};
  }
  if (type == "product_bernoulli") {
    const std::vector<double> g1 = theta1.resolve();
    const std::vector<double> g2 = theta2.resolve();
    std::vector<std::vector<double>> pts;
    pts.reserve(g1.size() * g2.size());
    for (double a : g1)
      for (double b : g2) pts.push_back({a, b});
    return {make_product_bernoulli_model(g1, g2, base2, slope2),
            std::move(pts)};
  }
  throw ConfigError("unknown model type: " + type);
}

BuiltModel ModelSpec::build_on_grid(const std::vector<double>& g) const {
  std::vector<std::vector<double>> pts;
  pts.reserve(g.size());
  for (double v : g) pts.push_back({v});
  if (type == "bernoulli_grid")
    return {make_bernoulli_grid_model(g), std::move(pts)};
  if (type == "gaussian_bins") {
    const double lo =
        x_min ? *x_min : *std::min_element(g.begin(), g.end()) - 4.0 * sigma;
    const double hi =
        x_max ? *x_max : *std::max_element(g.begin(), g.end()) + 4.0 * sigma;
    return {make_gaussian_bin_model(g, sigma, bins, lo, hi), std::move(pts)};
  }
  throw ConfigError("model type " + type + " cannot be built on a 1-d grid");
}

std::size_t nearest_node(const std::vector<std::vector<double>>& coords,
                         const std::vector<double>& target) {
  if (coords.empty()) throw ConfigError("no grid nodes to resolve against");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i].size() != target.size())
      throw ConfigError("point dimension does not match the grid");
    double s = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
      const double d = coords[i][k] - target[k];
      s += d * d;
    }
    if (s < best_d) {
      best_d = s;
      best = i;
    }
  }
  return best;
}

DiscreteMeasure PriorSpec::build(const BuiltModel& built) const {
  const SpacePtr& space = built.model.theta_space();
  const std::size_t n = space->size();
  if (type == "uniform")
    return {space, std::vector<double>(n, 1.0)};
  if (type == "dirac") {
    if (index) return dirac(space, *index);
    if (value) return dirac(space, nearest_node(built.coords, {*value}));
    throw ConfigError("dirac prior needs an index or a value");
  }
  if (type == "weights") {
    if (weights.size() != n)
      throw ConfigError("prior weight vector length does not match the grid");
    return {space, weights};
  }
  if (type == "slice_uniform") {
    std::vector<double> w(n, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = built.coords[i];
      if (slice_dim >= p.size())
        throw ConfigError("slice_uniform dimension out of range");
      if (p[slice_dim] == slice_value) {
        w[i] = 1.0;
        any = true;
      }
    }
    if (!any)
      throw ConfigError("slice_uniform selects no grid nodes");
    return {space, std::move(w)};
  }
  throw ConfigError("unknown prior type: " + type);
}

namespace {

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  if (j.is_array()) {
    g.coords = j.get<std::vector<double>>();
    return g;
  }
  if (j.contains("coords")) g.coords = j.at("coords").get<std::vector<double>>();
  if (j.contains("min")) g.min = j.at("min").get<double>();
  if (j.contains("max")) g.max = j.at("max").get<double>();
  if (j.contains("points")) g.points = j.at("points").get<std::size_t>();
  return g;
}

nlohmann::ordered_json grid_to_json(const GridSpec& g) {
  nlohmann::ordered_json out;
  if (!g.coords.empty()) {
    out["coords"] = g.coords;
  } else {
    out["min"] = g.min;
    out["max"] = g.max;
    out["points"] = g.points;
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("experiment_id"))
      cfg.experiment_id = j.at("experiment_id").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("schedule"))
      cfg.schedule = j.at("schedule").get<std::vector<std::size_t>>();
    if (j.contains("replicates"))
      cfg.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("seed_groups"))
      cfg.seed_groups = j.at("seed_groups").get<std::size_t>();
    if (j.contains("max_grid_points"))
      cfg.max_grid_points = j.at("max_grid_points").get<std::size_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();

    if (j.contains("model")) {
      const json& m = j.at("model");
      cfg.model.type = m.at("type").get<std::string>();
      if (m.contains("grid")) cfg.model.grid = grid_from_json(m.at("grid"));
      if (m.contains("coords"))
        cfg.model.coords = m.at("coords").get<std::vector<std::vector<double>>>();
      if (m.contains("likelihood"))
        cfg.model.likelihood =
            m.at("likelihood").get<std::vector<std::vector<double>>>();
      if (m.contains("theta1")) cfg.model.theta1 = grid_from_json(m.at("theta1"));
      if (m.contains("theta2")) cfg.model.theta2 = grid_from_json(m.at("theta2"));
      if (m.contains("base2")) cfg.model.base2 = m.at("base2").get<double>();
      if (m.contains("slope2")) cfg.model.slope2 = m.at("slope2").get<double>();
      if (m.contains("sigma")) cfg.model.sigma = m.at("sigma").get<double>();
      if (m.contains("bins")) cfg.model.bins = m.at("bins").get<std::size_t>();
      if (m.contains("x_min")) cfg.model.x_min = m.at("x_min").get<double>();
      if (m.contains("x_max")) cfg.model.x_max = m.at("x_max").get<double>();
    }

    if (j.contains("prior")) {
      const json& p = j.at("prior");
      cfg.prior.type = p.at("type").get<std::string>();
      if (p.contains("index")) cfg.prior.index = p.at("index").get<std::size_t>();
      if (p.contains("value")) cfg.prior.value = p.at("value").get<double>();
      if (p.contains("weights"))
        cfg.prior.weights = p.at("weights").get<std::vector<double>>();
      if (p.contains("slice_dim"))
        cfg.prior.slice_dim = p.at("slice_dim").get<std::size_t>();
      if (p.contains("slice_value"))
        cfg.prior.slice_value = p.at("slice_value").get<double>();
    }

    if (j.contains("perturbation")) {
      const json& p = j.at("perturbation");
      auto opt = [&](const char* key) -> std::optional<double> {
        if (p.contains(key)) return p.at(key).get<double>();
        return std::nullopt;
      };
      cfg.perturbation.alpha = opt("alpha");
      cfg.perturbation.epsilon = opt("epsilon");
      cfg.perturbation.rho = opt("rho");
      cfg.perturbation.delta = opt("delta");
      if (p.contains("theta")) {
        if (p.at("theta").is_array())
          cfg.perturbation.theta = p.at("theta").get<std::vector<double>>();
        else
          cfg.perturbation.theta =
              std::vector<double>{p.at("theta").get<double>()};
      }
      if (p.contains("theta_star")) {
        if (p.at("theta_star").is_array())
          cfg.perturbation.theta_star =
              p.at("theta_star").get<std::vector<double>>();
        else
          cfg.perturbation.theta_star =
              std::vector<double>{p.at("theta_star").get<double>()};
      }
      if (p.contains("theta_index"))
        cfg.perturbation.theta_index = p.at("theta_index").get<std::size_t>();
      if (p.contains("theta_star_index"))
        cfg.perturbation.theta_star_index =
            p.at("theta_star_index").get<std::size_t>();
      if (p.contains("eps_bar"))
        cfg.perturbation.eps_bar = p.at("eps_bar").get<double>();
      if (p.contains("eps_prime"))
        cfg.perturbation.eps_prime = p.at("eps_prime").get<double>();
      if (p.contains("gap_lower_bound"))
        cfg.perturbation.gap_lower_bound =
            p.at("gap_lower_bound").get<double>();
    }

    if (j.contains("diagnostics")) {
      const json& d = j.at("diagnostics");
      if (d.contains("neighborhood_radius"))
        cfg.diagnostics.neighborhood_radius =
            d.at("neighborhood_radius").get<double>();
      if (d.contains("conv_eps"))
        cfg.diagnostics.conv_eps = d.at("conv_eps").get<double>();
      if (d.contains("kl_ladder"))
        cfg.diagnostics.kl_ladder =
            d.at("kl_ladder").get<std::vector<double>>();
      if (d.contains("allow_inexact_covering"))
        cfg.diagnostics.allow_inexact_covering =
            d.at("allow_inexact_covering").get<bool>();
    }

    if (j.contains("grids"))
      for (const json& g : j.at("grids")) cfg.grids.push_back(grid_from_json(g));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate_shape();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::validate_shape() const {
  // metric_validation admits an empty sweep (R = 0); every Monte Carlo kind
  // needs at least one replicate.
  if (kind == ExperimentKind::kMetricValidation) {
    if (seed_groups == 0) throw ConfigError("seed_groups must be >= 1");
    return;
  }
  if (replicates == 0) throw ConfigError("replicates must be >= 1");
  if (seed_groups == 0) throw ConfigError("seed_groups must be >= 1");
  if (seed_groups > replicates)
    throw ConfigError("seed_groups cannot exceed replicates");
  const bool needs_schedule = kind != ExperimentKind::kMetricValidation;
  if (needs_schedule) {
    if (schedule.empty()) throw ConfigError("schedule must be nonempty");
    for (std::size_t i = 1; i < schedule.size(); ++i)
      if (schedule[i] <= schedule[i - 1])
        throw ConfigError("schedule must be strictly increasing");
  }
  if (kind == ExperimentKind::kGrowingDiameter && grids.size() < 1)
    throw ConfigError("growing_diameter needs a list of grids");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  j["name"] = name;
  j["seed"] = seed;
  j["experiment_id"] = experiment_id;
  j["threads"] = threads;
  j["replicates"] = replicates;
  j["seed_groups"] = seed_groups;
  j["max_grid_points"] = max_grid_points;
  j["schedule"] = schedule;

  nlohmann::ordered_json m;
  m["type"] = model.type;
  if (model.type == "bernoulli_grid" || model.type == "gaussian_bins")
    m["grid"] = grid_to_json(model.grid);
  if (model.type == "categorical") {
    m["coords"] = model.coords;
    m["likelihood"] = model.likelihood;
  }
  if (model.type == "product_bernoulli") {
    m["theta1"] = grid_to_json(model.theta1);
    m["theta2"] = grid_to_json(model.theta2);
    m["base2"] = model.base2;
    m["slope2"] = model.slope2;
  }
  if (model.type == "gaussian_bins") {
    m["sigma"] = model.sigma;
    m["bins"] = model.bins;
    if (model.x_min) m["x_min"] = *model.x_min;
    if (model.x_max) m["x_max"] = *model.x_max;
  }
  j["model"] = m;

  nlohmann::ordered_json p;
  p["type"] = prior.type;
  if (prior.index) p["index"] = *prior.index;
  if (prior.value) p["value"] = *prior.value;
  if (!prior.weights.empty()) p["weights"] = prior.weights;
  if (prior.type == "slice_uniform") {
    p["slice_dim"] = prior.slice_dim;
    p["slice_value"] = prior.slice_value;
  }
  j["prior"] = p;

  nlohmann::ordered_json q;
  if (perturbation.alpha) q["alpha"] = *perturbation.alpha;
  if (perturbation.epsilon) q["epsilon"] = *perturbation.epsilon;
  if (perturbation.rho) q["rho"] = *perturbation.rho;
  if (perturbation.delta) q["delta"] = *perturbation.delta;
  if (perturbation.theta) q["theta"] = *perturbation.theta;
  if (perturbation.theta_star) q["theta_star"] = *perturbation.theta_star;
  if (perturbation.theta_index) q["theta_index"] = *perturbation.theta_index;
  if (perturbation.theta_star_index)
    q["theta_star_index"] = *perturbation.theta_star_index;
  q["eps_bar"] = perturbation.eps_bar;
  q["eps_prime"] = perturbation.eps_prime;
  q["gap_lower_bound"] = perturbation.gap_lower_bound;
  j["perturbation"] = q;

  nlohmann::ordered_json d;
  d["neighborhood_radius"] = diagnostics.neighborhood_radius;
  d["conv_eps"] = diagnostics.conv_eps;
  d["kl_ladder"] = diagnostics.kl_ladder;
  d["allow_inexact_covering"] = diagnostics.allow_inexact_covering;
  j["diagnostics"] = d;

  if (!grids.empty()) {
    nlohmann::ordered_json gl = nlohmann::ordered_json::array();
    for (const auto& g : grids) gl.push_back(grid_to_json(g));
    j["grids"] = gl;
  }
  j["output"] = output;
  return j;
}

}  // namespace robayes::harness
