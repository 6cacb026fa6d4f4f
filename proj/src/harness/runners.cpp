#include "robayes/harness/runners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "robayes/parallel.hpp"
#include "robayes/perturbation.hpp"

namespace robayes::harness {

namespace {

double require_param(const std::optional<double>& v, const char* name) {
  if (!v)
    throw ConfigError(std::string("missing required parameter: ") + name);
  return *v;
}

void check_grid_cap(const ExperimentConfig& cfg, const BuiltModel& built) {
  if (built.model.grid_size() > cfg.max_grid_points)
    throw ConfigError("grid has " + std::to_string(built.model.grid_size()) +
                      " points, above the configured max_grid_points = " +
                      std::to_string(cfg.max_grid_points));
}

std::size_t resolve_point(const BuiltModel& built,
                          const std::optional<std::size_t>& index,
                          const std::optional<std::vector<double>>& value,
                          const char* what) {
  if (index) {
    built.model.theta_space()->require_index(*index);
    return *index;
  }
  if (value) return nearest_node(built.coords, *value);
  throw ConfigError(std::string("missing required parameter: ") + what);
}

struct GroupSpan {
  std::size_t first;
  std::size_t count;
};

std::vector<GroupSpan> group_spans(std::size_t replicates, std::size_t groups) {
  std::vector<GroupSpan> out;
  const std::size_t base = replicates / groups;
  const std::size_t extra = replicates % groups;
  std::size_t at = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t count = base + (g < extra ? 1 : 0);
    out.push_back({at, count});
    at += count;
  }
  return out;
}

// Type-7 quantile on a sorted vector.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

SpacePtr shared_subspace(const SpacePtr& space,
                         const std::vector<std::size_t>& idx) {
  return std::make_shared<const FiniteMetricSpace>(space->subspace(idx));
}

// ---------------------------------------------------------------------------
// Coupled-pair curve: one shared data stream conditions both priors; the
// report gets KF of the paired distances, the meta-space gap, and the Dudley
// slack between them, pooled and per seed group.
// ---------------------------------------------------------------------------

struct CoupledCurveStats {
  double final_meta = 0.0;
  double final_kf = 0.0;
  double final_group_spread = 0.0;
  std::size_t dudley_violations = 0;
};

CoupledCurveStats coupled_gap_curve(Report& rep, const std::string& prefix,
                                    const DiscreteMeasure& prior1,
                                    const DiscreteMeasure& prior2,
                                    const CategoricalModel& model,
                                    std::size_t data_theta,
                                    const ExperimentConfig& cfg) {
  CoupledCurveStats stats;
  const std::size_t m = cfg.replicates;
  const auto groups = group_spans(m, cfg.seed_groups);
  for (std::size_t n : cfg.schedule) {
    const EmpiricalLaw law1 = posterior_law(prior1, model, data_theta, n, m,
                                            cfg.rng_seed(), cfg.threads);
    const EmpiricalLaw law2 = posterior_law(prior2, model, data_theta, n, m,
                                            cfg.rng_seed(), cfg.threads);
    const SpacePtr meta = meta_space(law1, law2, cfg.threads);

    std::vector<double> paired(m);
    for (std::size_t i = 0; i < m; ++i) paired[i] = meta->dist(i, m + i);
    const double kf = ky_fan_empirical(paired);
    const double gap = detail::prokhorov_between_uniform_blocks(meta, m);

    rep.add(prefix + "coupled_ky_fan", n, kf);
    rep.add(prefix + "meta_prokhorov_gap", n, gap);
    rep.add(prefix + "dudley_slack", n, kf - gap);
    if (gap > kf + 1e-9) ++stats.dudley_violations;

    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto [first, count] = groups[g];
      std::vector<std::size_t> idx;
      idx.reserve(2 * count);
      for (std::size_t i = 0; i < count; ++i) idx.push_back(first + i);
      for (std::size_t i = 0; i < count; ++i) idx.push_back(m + first + i);
      const double ggap = detail::prokhorov_between_uniform_blocks(
          shared_subspace(meta, idx), count);
      const double gkf = ky_fan_empirical(
          std::span<const double>(paired.data() + first, count));
      const std::string tag = std::to_string(g);
      rep.add(prefix + "meta_prokhorov_gap", n, ggap, tag);
      rep.add(prefix + "coupled_ky_fan", n, gkf, tag);
      if (ggap > gkf + 1e-9) ++stats.dudley_violations;
      g_min = std::min(g_min, ggap);
      g_max = std::max(g_max, ggap);
    }

    if (n == cfg.schedule.back()) {
      stats.final_meta = gap;
      stats.final_kf = kf;
      stats.final_group_spread = g_max - g_min;
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Per-kind preparation: everything that can fail before any data is drawn.
// `validate` uses these directly; runners continue with the Monte Carlo part.
// ---------------------------------------------------------------------------

struct ConsistencyCtx {
  BuiltModel built;
  DiscreteMeasure prior;
  std::size_t theta_star;
  IndexSet neighborhood;
};

ConsistencyCtx prepare_consistency(const ExperimentConfig& cfg) {
  BuiltModel built = cfg.model.build();
  check_grid_cap(cfg, built);
  DiscreteMeasure prior = cfg.prior.build(built);
  const std::size_t theta_star =
      resolve_point(built, cfg.perturbation.theta_star_index,
                    cfg.perturbation.theta_star, "theta_star");
  if (!has_kl_support(prior, built.model, theta_star,
                      cfg.diagnostics.kl_ladder))
    throw PreconditionError(
        "prior has no Kullback-Leibler support at theta_star; the "
        "consistency hypothesis fails and the run would not probe it");
  IndexSet u = enlarge(*built.model.theta_space(), IndexSet{theta_star},
                       cfg.diagnostics.neighborhood_radius, /*open_ball=*/true);
  return {std::move(built), std::move(prior), theta_star, std::move(u)};
}

struct BrittlenessCtx {
  BuiltModel built;
  DiscreteMeasure prior;
  DiscreteMeasure perturbed;
  DiscreteMeasure anchor;
  std::size_t theta = 0;
  std::size_t theta_star = 0;
  double alpha = 0.0;
  double prior_tv_gap = 0.0;
  double limit_target = 0.0;
};

BrittlenessCtx prepare_brittleness(const ExperimentConfig& cfg) {
  BuiltModel built = cfg.model.build();
  check_grid_cap(cfg, built);
  DiscreteMeasure prior = cfg.prior.build(built);
  const double alpha = require_param(cfg.perturbation.alpha, "alpha");
  const double rho = require_param(cfg.perturbation.rho, "rho");
  const double delta = cfg.perturbation.delta.value_or(rho);
  if (!(alpha < std::min(delta, rho)))
    throw PreconditionError(
        "alpha must satisfy alpha < min(delta, rho): the contaminated prior "
        "has to stay inside the admissible total-variation ball");
  const std::size_t theta = resolve_point(
      built, cfg.perturbation.theta_index, cfg.perturbation.theta, "theta");
  const std::size_t theta_star =
      resolve_point(built, cfg.perturbation.theta_star_index,
                    cfg.perturbation.theta_star, "theta_star");
  const double d = built.model.theta_space()->diameter();
  if (!(cfg.perturbation.eps_bar < std::min(d / 2.0, 1.0)))
    throw ConfigError("eps_bar must be below min(diameter/2, 1)");
  if (!has_kl_support(prior, built.model, theta_star,
                      cfg.diagnostics.kl_ladder))
    throw PreconditionError(
        "base prior has no Kullback-Leibler support at theta_star");

  DiscreteMeasure perturbed = dirac_contamination(prior, theta, alpha);
  DiscreteMeasure anchor = dirac(built.model.theta_space(), theta);
  const double tv = total_variation(perturbed, anchor);
  if (tv > alpha + 1e-12)
    throw InvariantError("contamination exceeded its TV budget");
  const double limit =
      std::min(1.0, built.model.theta_space()->dist(theta_star, theta));
  return {std::move(built), std::move(prior),   std::move(perturbed),
          std::move(anchor), theta,             theta_star,
          alpha,             tv,                limit};
}

struct CoveringCtx {
  BuiltModel built;
  DiscreteMeasure prior;
  DiscreteMeasure evacuated;
  std::size_t theta_star = 0;
  double epsilon = 0.0;
  double least_mass = 0.0;
  double tv = 0.0;
  CoveringCertificate cover2;
};

CoveringCtx prepare_covering(const ExperimentConfig& cfg,
                             const BuiltModel* override_model,
                             const DiscreteMeasure* override_prior) {
  BuiltModel built = override_model ? *override_model : cfg.model.build();
  check_grid_cap(cfg, built);
  DiscreteMeasure prior =
      override_prior ? *override_prior : cfg.prior.build(built);
  const double epsilon = require_param(cfg.perturbation.epsilon, "epsilon");
  const FiniteMetricSpace& space = *built.model.theta_space();

  CoveringCertificate cover2 = covering_number(space, 2.0 * epsilon);
  if (!cover2.exact && !cfg.diagnostics.allow_inexact_covering)
    throw PreconditionError(
        "exact covering number unavailable for grids larger than 24 points; "
        "set diagnostics.allow_inexact_covering to accept the greedy bound");

  const auto [theta_star, least] = least_mass_center(prior, epsilon);
  const IndexSet ball =
      enlarge(space, IndexSet{theta_star}, epsilon, /*open_ball=*/true);
  bool outside = false;
  for (std::size_t i = 0; i < prior.size() && !outside; ++i)
    outside = prior.weight(i) > 0.0 && !ball.contains(i);
  if (!outside)
    throw ConfigError(
        "epsilon swallows the entire prior support: the evacuated prior is "
        "undefined at the least-mass center");

  DiscreteMeasure evac = ball_evacuation(prior, theta_star, epsilon);
  const double tv = total_variation(prior, evac);
  const double evacuated_mass = prior.mass(ball);
  if (std::fabs(tv - evacuated_mass) > 1e-12)
    throw InvariantError(
        "evacuation TV distance must equal the evacuated mass exactly");
  if (cover2.exact && tv > 1.0 / static_cast<double>(cover2.count) + 1e-12)
    throw InvariantError("evacuation TV distance exceeds 1/N at 2*epsilon");
  return {std::move(built), std::move(prior), std::move(evac), theta_star,
          epsilon,          least,            tv,              std::move(cover2)};
}

struct MisspecCtx {
  BuiltModel built;
  DiscreteMeasure prior;
  DiscreteMeasure perturbed;
  std::size_t theta_star = 0;
  double theta2_star = 0.0;
  double alpha = 0.0;
  double tv = 0.0;
};

MisspecCtx prepare_misspecification(const ExperimentConfig& cfg) {
  if (cfg.model.type != "product_bernoulli")
    throw ConfigError(
        "misspecification_slice needs the product_bernoulli model");
  if (cfg.prior.type != "slice_uniform")
    throw ConfigError(
        "misspecification_slice needs a slice_uniform prior on the submodel");
  BuiltModel built = cfg.model.build();
  check_grid_cap(cfg, built);
  DiscreteMeasure prior = cfg.prior.build(built);
  const double alpha = require_param(cfg.perturbation.alpha, "alpha");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in [0, 1]");
  const std::size_t theta_star =
      resolve_point(built, cfg.perturbation.theta_star_index,
                    cfg.perturbation.theta_star, "theta_star");
  const double theta2_star = built.coords[theta_star][1];
  // Move alpha of the slice prior's mass onto theta_star.
  DiscreteMeasure perturbed = dirac_contamination(prior, theta_star, 1.0 - alpha);
  const double tv = total_variation(prior, perturbed);
  if (tv > alpha + 1e-12)
    throw InvariantError("slice perturbation exceeded its TV budget");
  if (alpha > 0.0 &&
      !has_kl_support(perturbed, built.model, theta_star,
                      cfg.diagnostics.kl_ladder))
    throw InvariantError(
        "perturbed prior lost Kullback-Leibler support at theta_star");
  return {std::move(built), std::move(prior), std::move(perturbed),
          theta_star,       theta2_star,      alpha,
          tv};
}

std::vector<std::vector<double>> resolve_nested_grids(
    const ExperimentConfig& cfg) {
  std::vector<std::vector<double>> grids;
  grids.reserve(cfg.grids.size());
  for (const GridSpec& g : cfg.grids) grids.push_back(g.resolve());
  for (std::size_t g = 0; g + 1 < grids.size(); ++g)
    for (double c : grids[g]) {
      bool found = false;
      for (double c2 : grids[g + 1])
        if (std::fabs(c - c2) <= 1e-9) {
          found = true;
          break;
        }
      if (!found)
        throw ConfigError("grids must be nested: grid " + std::to_string(g) +
                          " is not contained in grid " + std::to_string(g + 1));
    }
  return grids;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

Report run_consistency(const ExperimentConfig& cfg) {
  ConsistencyCtx ctx = prepare_consistency(cfg);
  const CategoricalModel& model = ctx.built.model;
  const SpacePtr& space = model.theta_space();
  const std::size_t m = cfg.replicates;
  const auto groups = group_spans(m, cfg.seed_groups);

  const DiscreteMeasure target = dirac(space, ctx.theta_star);
  const EmpiricalLaw singleton = EmpiricalLaw::repeated(target, 1);

  Report rep;
  double identity_max_gap = 0.0;
  std::size_t dudley_violations = 0;
  for (std::size_t n : cfg.schedule) {
    const EmpiricalLaw law = posterior_law(ctx.prior, model, ctx.theta_star, n,
                                           m, cfg.rng_seed(), cfg.threads);
    // One meta-space holds every diagnostic: the law samples plus the target.
    const SpacePtr meta = meta_space(law, singleton, cfg.threads);
    std::vector<double> dists(m);
    for (std::size_t i = 0; i < m; ++i) dists[i] = meta->dist(i, m);

    std::vector<double> masses(m);
    for (std::size_t i = 0; i < m; ++i) masses[i] = law[i].mass(ctx.neighborhood);
    std::vector<double> sorted_masses = masses;
    std::sort(sorted_masses.begin(), sorted_masses.end());

    const double kf = ky_fan_empirical(dists);
    const double meta_to_dirac = detail::prokhorov_between_uniform_blocks(meta, m);
    std::size_t exceed = 0;
    for (double d : dists) exceed += d > cfg.diagnostics.conv_eps;

    rep.add("posterior_mass_U_mean", n,
            std::accumulate(masses.begin(), masses.end(), 0.0) /
                static_cast<double>(m));
    rep.add("posterior_mass_U_median", n, quantile(sorted_masses, 0.5));
    rep.add("posterior_mass_U_q10", n, quantile(sorted_masses, 0.10));
    rep.add("posterior_mass_U_q90", n, quantile(sorted_masses, 0.90));
    rep.add("frac_dpr_gt_eps", n,
            static_cast<double>(exceed) / static_cast<double>(m));
    rep.add("ky_fan_to_dirac", n, kf);
    rep.add("meta_prokhorov_to_dirac", n, meta_to_dirac);
    const double gap = std::fabs(kf - meta_to_dirac);
    rep.add("kf_meta_identity_gap", n, gap);
    identity_max_gap = std::max(identity_max_gap, gap);
    if (meta_to_dirac > kf + 1e-9) ++dudley_violations;

    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto [first, count] = groups[g];
      std::vector<double> gm(masses.begin() + first,
                             masses.begin() + first + count);
      std::sort(gm.begin(), gm.end());
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < count; ++i) idx.push_back(first + i);
      idx.push_back(m);  // the target point
      const double gmeta = detail::prokhorov_between_uniform_blocks(
          shared_subspace(meta, idx), count);
      const double gkf = ky_fan_empirical(
          std::span<const double>(dists.data() + first, count));
      const std::string tag = std::to_string(g);
      rep.add("posterior_mass_U_median", n, quantile(gm, 0.5), tag);
      rep.add("ky_fan_to_dirac", n, gkf, tag);
      rep.add("meta_prokhorov_to_dirac", n, gmeta, tag);
      if (gmeta > gkf + 1e-9) ++dudley_violations;
    }
  }

  const std::size_t n_final = cfg.schedule.back();
  const auto group_metas = rep.group_values("meta_prokhorov_to_dirac", n_final);
  const auto [lo, hi] =
      std::minmax_element(group_metas.begin(), group_metas.end());
  rep.summary["theta_star_index"] = ctx.theta_star;
  rep.summary["neighborhood_size"] = ctx.neighborhood.size();
  rep.summary["final_posterior_mass_U_median"] =
      rep.value("posterior_mass_U_median", n_final);
  rep.summary["final_meta_prokhorov_to_dirac"] =
      rep.value("meta_prokhorov_to_dirac", n_final);
  rep.summary["final_seed_group_spread"] = *hi - *lo;
  rep.summary["kf_meta_identity_max_gap"] = identity_max_gap;
  rep.summary["dudley_violations"] = dudley_violations;
  return rep;
}

Report run_brittleness(const ExperimentConfig& cfg) {
  BrittlenessCtx ctx = prepare_brittleness(cfg);
  Report rep;
  for (std::size_t n : cfg.schedule) rep.add("prior_tv_gap", n, ctx.prior_tv_gap);
  const CoupledCurveStats stats =
      coupled_gap_curve(rep, "", ctx.perturbed, ctx.anchor, ctx.built.model,
                        ctx.theta_star, cfg);
  rep.summary["theta_index"] = ctx.theta;
  rep.summary["theta_star_index"] = ctx.theta_star;
  rep.summary["alpha"] = ctx.alpha;
  rep.summary["prior_tv_gap"] = ctx.prior_tv_gap;
  rep.summary["limit_target"] = ctx.limit_target;
  rep.summary["eps_bar"] = cfg.perturbation.eps_bar;
  rep.summary["final_meta_prokhorov_gap"] = stats.final_meta;
  rep.summary["final_seed_group_spread"] = stats.final_group_spread;
  rep.summary["brittle"] = stats.final_meta > cfg.perturbation.eps_bar;
  rep.summary["dudley_violations"] = stats.dudley_violations;
  return rep;
}

Report run_covering_bound(const ExperimentConfig& cfg) {
  CoveringCtx ctx = prepare_covering(cfg, nullptr, nullptr);
  Report rep;
  const double bound = 1.0 / static_cast<double>(ctx.cover2.count);
  for (std::size_t n : cfg.schedule) {
    rep.add("least_mass", n, ctx.least_mass);
    rep.add("covering_bound", n, bound);
    rep.add("prior_tv_evacuated", n, ctx.tv);
  }
  const CoupledCurveStats stats = coupled_gap_curve(
      rep, "", ctx.prior, ctx.evacuated, ctx.built.model, ctx.theta_star, cfg);
  const double gap_target = ctx.epsilon - cfg.perturbation.eps_prime;
  rep.summary["theta_star_index"] = ctx.theta_star;
  rep.summary["epsilon"] = ctx.epsilon;
  rep.summary["covering_n2eps"] = ctx.cover2.count;
  rep.summary["covering_exact"] = ctx.cover2.exact;
  rep.summary["least_mass"] = ctx.least_mass;
  rep.summary["prior_tv_evacuated"] = ctx.tv;
  rep.summary["tv_within_bound"] = ctx.tv <= bound + 1e-12;
  rep.summary["final_meta_prokhorov_gap"] = stats.final_meta;
  rep.summary["final_seed_group_spread"] = stats.final_group_spread;
  rep.summary["gap_target"] = gap_target;
  rep.summary["gap_reached"] = stats.final_meta >= gap_target;
  rep.summary["dudley_violations"] = stats.dudley_violations;
  return rep;
}

Report run_growing_diameter(const ExperimentConfig& cfg) {
  if (cfg.prior.type != "uniform")
    throw ConfigError("growing_diameter runs use a uniform prior per grid");
  const auto grids = resolve_nested_grids(cfg);
  const double rho = require_param(cfg.perturbation.rho, "rho");

  Report rep;
  double prev_bound = std::numeric_limits<double>::infinity();
  bool non_increasing = true;
  std::size_t dudley_violations = 0;
  nlohmann::ordered_json per_grid = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < grids.size(); ++g) {
    BuiltModel built = cfg.model.build_on_grid(grids[g]);
    DiscreteMeasure uniform(built.model.theta_space(),
                            std::vector<double>(grids[g].size(), 1.0));
    CoveringCtx ctx = prepare_covering(cfg, &built, &uniform);
    const double n_bound = 1.0 / static_cast<double>(ctx.cover2.count);
    const double bound = std::min(n_bound, rho);
    if (bound > prev_bound + 1e-15) non_increasing = false;
    prev_bound = bound;

    const std::string prefix = "grid" + std::to_string(g) + "/";
    rep.add(prefix + "diameter", 0, built.model.theta_space()->diameter());
    rep.add(prefix + "covering_n2eps", 0,
            static_cast<double>(ctx.cover2.count));
    rep.add(prefix + "bound", 0, bound);
    rep.add(prefix + "least_mass", 0, ctx.least_mass);
    rep.add(prefix + "prior_tv_evacuated", 0, ctx.tv);
    const CoupledCurveStats stats =
        coupled_gap_curve(rep, prefix, ctx.prior, ctx.evacuated, ctx.built.model,
                          ctx.theta_star, cfg);
    dudley_violations += stats.dudley_violations;

    nlohmann::ordered_json row;
    row["grid"] = g;
    row["points"] = grids[g].size();
    row["diameter"] = built.model.theta_space()->diameter();
    row["covering_n2eps"] = ctx.cover2.count;
    row["covering_exact"] = ctx.cover2.exact;
    row["bound"] = bound;
    row["theta_star_index"] = ctx.theta_star;
    row["final_meta_prokhorov_gap"] = stats.final_meta;
    per_grid.push_back(row);
  }
  rep.summary["per_grid"] = per_grid;
  rep.summary["bound_non_increasing"] = non_increasing;
  rep.summary["final_bound"] = prev_bound;
  rep.summary["dudley_violations"] = dudley_violations;
  return rep;
}

Report run_misspecification_slice(const ExperimentConfig& cfg) {
  MisspecCtx ctx = prepare_misspecification(cfg);
  Report rep;
  for (std::size_t n : cfg.schedule) rep.add("prior_tv_gap", n, ctx.tv);
  const CoupledCurveStats stats =
      coupled_gap_curve(rep, "", ctx.prior, ctx.perturbed, ctx.built.model,
                        ctx.theta_star, cfg);
  rep.summary["theta_star_index"] = ctx.theta_star;
  rep.summary["theta2_star"] = ctx.theta2_star;
  rep.summary["alpha"] = ctx.alpha;
  rep.summary["prior_tv_gap"] = ctx.tv;
  rep.summary["final_meta_prokhorov_gap"] = stats.final_meta;
  rep.summary["final_seed_group_spread"] = stats.final_group_spread;
  rep.summary["misspecified"] = ctx.theta2_star != 0.0;
  if (ctx.theta2_star != 0.0 && ctx.alpha > 0.0) {
    rep.summary["gap_lower_bound"] = cfg.perturbation.gap_lower_bound;
    rep.summary["gap_persistent"] =
        stats.final_meta >= cfg.perturbation.gap_lower_bound;
  }
  rep.summary["dudley_violations"] = stats.dudley_violations;
  return rep;
}

// ---------------------------------------------------------------------------
// Metric validation: a property sweep over random spaces and measures.
// ---------------------------------------------------------------------------

namespace {

DiscreteMeasure random_measure(const SpacePtr& space, RngStream& rng,
                               bool allow_sparse) {
  const std::size_t n = space->size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = -std::log(1.0 - rng.next_unit());
  if (allow_sparse && n >= 2 && rng.next_unit() < 0.35) {
    const std::size_t keep = 1 + rng.next_below(n - 1);
    for (std::size_t i = keep; i < n; ++i) w[i] = 0.0;
  }
  return {space, std::move(w)};
}

SpacePtr random_space(RngStream& rng, std::size_t max_points) {
  const std::size_t n = 2 + rng.next_below(max_points - 1);
  const std::size_t dim = 1 + rng.next_below(2);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
  for (auto& p : pts)
    for (double& c : p) c = 2.0 * rng.next_unit();
  return build_grid_space(pts);
}

}  // namespace

Report run_metric_validation(const ExperimentConfig& cfg) {
  Report rep;
  const std::size_t rounds = cfg.replicates;
  RngStream rng(cfg.seed, cfg.experiment_id, 0);

  std::size_t v_axioms = 0, v_dpr_tv = 0, v_pinsker = 0, v_sandwich = 0,
              v_oracle = 0, v_lemlb = 0, v_delta = 0, v_identity = 0;
  double oracle_max_dev = 0.0;

  for (std::size_t r = 0; r < rounds; ++r) {
    const SpacePtr space = random_space(rng, 8);
    const DiscreteMeasure mu = random_measure(space, rng, true);
    const DiscreteMeasure nu = random_measure(space, rng, true);
    const DiscreteMeasure xi = random_measure(space, rng, true);

    const double tv_mn = total_variation(mu, nu);
    const double pr_mn = prokhorov(mu, nu);
    const double he_mn = hellinger(mu, nu);

    // Metric axioms for tv, hellinger and prokhorov.
    if (total_variation(mu, mu) != 0.0 || prokhorov(mu, mu) > 1e-12 ||
        hellinger(mu, mu) != 0.0)
      ++v_axioms;
    if (std::fabs(tv_mn - total_variation(nu, mu)) > 1e-12 ||
        std::fabs(pr_mn - prokhorov(nu, mu)) > 1e-9 ||
        std::fabs(he_mn - hellinger(nu, mu)) > 1e-12)
      ++v_axioms;
    if (tv_mn > total_variation(mu, xi) + total_variation(xi, nu) + 1e-12 ||
        he_mn > hellinger(mu, xi) + hellinger(xi, nu) + 1e-12 ||
        pr_mn > prokhorov(mu, xi) + prokhorov(xi, nu) + 1e-9)
      ++v_axioms;

    if (pr_mn > tv_mn + 1e-12) ++v_dpr_tv;

    const DiscreteMeasure full_mu = random_measure(space, rng, false);
    const DiscreteMeasure full_nu = random_measure(space, rng, false);
    if (kl_divergence(full_mu, full_nu) <
        0.5 * std::pow(total_variation(full_mu, full_nu), 2) - 1e-12)
      ++v_pinsker;

    if (he_mn * he_mn > tv_mn + 1e-12 ||
        tv_mn > std::sqrt(2.0) * he_mn + 1e-12)
      ++v_sandwich;

    const double dev = std::fabs(pr_mn - prokhorov_oracle(mu, nu));
    oracle_max_dev = std::max(oracle_max_dev, dev);
    if (dev > 1e-9) ++v_oracle;

    // Dirac closed form.
    const std::size_t i = rng.next_below(space->size());
    const std::size_t j = rng.next_below(space->size());
    if (prokhorov(dirac(space, i), dirac(space, j)) !=
        std::min(1.0, space->dist(i, j)))
      ++v_delta;

    // Lower bound from the mass of an enlarged set.
    {
      std::vector<std::size_t> b_idx;
      for (std::size_t k = 0; k < space->size(); ++k)
        if (rng.next_unit() < 0.4) b_idx.push_back(k);
      if (b_idx.empty()) b_idx.push_back(rng.next_below(space->size()));
      const IndexSet b(b_idx);
      const double alpha = rng.next_unit() * space->diameter();
      const double delta = mu.mass(enlarge(*space, b, alpha, true));
      const double lower = std::min(alpha, nu.mass(b) - delta);
      if (pr_mn < lower - 1e-9) ++v_lemlb;
    }

    // Ky Fan / meta identity on a small law.
    {
      std::vector<DiscreteMeasure> samples;
      const std::size_t count = 1 + rng.next_below(4);
      for (std::size_t k = 0; k < count; ++k)
        samples.push_back(random_measure(space, rng, true));
      const EmpiricalLaw law(std::move(samples));
      const DiscreteMeasure target = dirac(space, rng.next_below(space->size()));
      const double kf = ky_fan_to_dirac(law, target);
      const double mp =
          meta_prokhorov(law, EmpiricalLaw::repeated(target, 1));
      if (std::fabs(kf - mp) > 1e-9) ++v_identity;
    }
  }

  rep.add("checks_run", 0, static_cast<double>(rounds));
  rep.add("violations_metric_axioms", 0, static_cast<double>(v_axioms));
  rep.add("violations_dpr_le_dtv", 0, static_cast<double>(v_dpr_tv));
  rep.add("violations_pinsker", 0, static_cast<double>(v_pinsker));
  rep.add("violations_hellinger_sandwich", 0, static_cast<double>(v_sandwich));
  rep.add("violations_oracle", 0, static_cast<double>(v_oracle));
  rep.add("violations_lem_lb", 0, static_cast<double>(v_lemlb));
  rep.add("violations_prop_delta", 0, static_cast<double>(v_delta));
  rep.add("violations_kf_meta_identity", 0, static_cast<double>(v_identity));
  rep.add("oracle_max_abs_dev", 0, oracle_max_dev);

  const std::size_t total = v_axioms + v_dpr_tv + v_pinsker + v_sandwich +
                            v_oracle + v_lemlb + v_delta + v_identity;
  rep.summary["checks_run"] = rounds;
  rep.summary["violations_total"] = total;
  rep.summary["oracle_max_abs_dev"] = oracle_max_dev;
  return rep;
}

// ---------------------------------------------------------------------------

Report run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  switch (cfg.kind) {
    case ExperimentKind::kConsistency: rep = run_consistency(cfg); break;
    case ExperimentKind::kBrittleness: rep = run_brittleness(cfg); break;
    case ExperimentKind::kCoveringBound: rep = run_covering_bound(cfg); break;
    case ExperimentKind::kGrowingDiameter: rep = run_growing_diameter(cfg); break;
    case ExperimentKind::kMisspecificationSlice:
      rep = run_misspecification_slice(cfg);
      break;
    case ExperimentKind::kMetricValidation:
      rep = run_metric_validation(cfg);
      break;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  nlohmann::ordered_json meta;
  meta["kind"] = to_string(cfg.kind);
  meta["name"] = cfg.name;
  meta["seed"] = cfg.seed;
  meta["experiment_id"] = cfg.experiment_id;
  meta["config"] = cfg.to_json();
  nlohmann::ordered_json timing;
  timing["wall_time_seconds"] = secs;
  meta["timing"] = timing;
  rep.metadata = meta;
  return rep;
}

nlohmann::ordered_json validate_experiment(const ExperimentConfig& cfg) {
  cfg.validate_shape();
  nlohmann::ordered_json echo;
  echo["kind"] = to_string(cfg.kind);
  echo["config"] = cfg.to_json();
  switch (cfg.kind) {
    case ExperimentKind::kConsistency: {
      const ConsistencyCtx ctx = prepare_consistency(cfg);
      echo["theta_star_index"] = ctx.theta_star;
      echo["neighborhood_size"] = ctx.neighborhood.size();
      echo["grid_size"] = ctx.built.model.grid_size();
      break;
    }
    case ExperimentKind::kBrittleness: {
      const BrittlenessCtx ctx = prepare_brittleness(cfg);
      echo["theta_index"] = ctx.theta;
      echo["theta_star_index"] = ctx.theta_star;
      echo["prior_tv_gap"] = ctx.prior_tv_gap;
      echo["limit_target"] = ctx.limit_target;
      break;
    }
    case ExperimentKind::kCoveringBound: {
      const CoveringCtx ctx = prepare_covering(cfg, nullptr, nullptr);
      echo["theta_star_index"] = ctx.theta_star;
      echo["covering_n2eps"] = ctx.cover2.count;
      echo["covering_exact"] = ctx.cover2.exact;
      echo["least_mass"] = ctx.least_mass;
      break;
    }
    case ExperimentKind::kGrowingDiameter: {
      if (cfg.prior.type != "uniform")
        throw ConfigError("growing_diameter runs use a uniform prior per grid");
      const auto grids = resolve_nested_grids(cfg);
      require_param(cfg.perturbation.rho, "rho");
      require_param(cfg.perturbation.epsilon, "epsilon");
      nlohmann::ordered_json sizes = nlohmann::ordered_json::array();
      for (const auto& g : grids) {
        // Same per-grid preparation the run performs, minus the sampling.
        BuiltModel built = cfg.model.build_on_grid(g);
        DiscreteMeasure uniform(built.model.theta_space(),
                                std::vector<double>(g.size(), 1.0));
        prepare_covering(cfg, &built, &uniform);
        sizes.push_back(g.size());
      }
      echo["grid_sizes"] = sizes;
      break;
    }
    case ExperimentKind::kMisspecificationSlice: {
      const MisspecCtx ctx = prepare_misspecification(cfg);
      echo["theta_star_index"] = ctx.theta_star;
      echo["theta2_star"] = ctx.theta2_star;
      echo["prior_tv_gap"] = ctx.tv;
      break;
    }
    case ExperimentKind::kMetricValidation:
      echo["checks_planned"] = cfg.replicates;
      break;
  }
  return echo;
}

}  // namespace robayes::harness
