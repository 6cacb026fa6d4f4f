#include "robayes/perturbation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace robayes {

KLNeighborhood kl_neighborhood(const CategoricalModel& model,
                               std::size_t theta_star, double epsilon) {
  if (!(epsilon >= 0.0))
    throw PreconditionError("KL neighborhood radius must be >= 0");
  model.theta_space()->require_index(theta_star);
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < model.grid_size(); ++j)
    if (model.model_kl(theta_star, j) <= epsilon) members.push_back(j);
  return {theta_star, epsilon, IndexSet(std::move(members))};
}

bool has_kl_support(const DiscreteMeasure& prior, const CategoricalModel& model,
                    std::size_t theta_star, std::span<const double> ladder) {
  if (prior.space() != model.theta_space())
    throw PreconditionError("prior must live on the model's parameter space");
  if (ladder.empty())
    throw PreconditionError("KL support ladder must be nonempty");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] > 0.0))
      throw PreconditionError("KL support ladder must be positive");
    if (k > 0 && !(ladder[k] < ladder[k - 1]))
      throw PreconditionError("KL support ladder must be strictly decreasing");
  }
  for (double eps : ladder) {
    const KLNeighborhood nb = kl_neighborhood(model, theta_star, eps);
    if (!(prior.mass(nb.members) > 0.0)) return false;
  }
  return true;
}

bool has_kl_support(const DiscreteMeasure& prior, const CategoricalModel& model,
                    std::size_t theta_star) {
  return has_kl_support(prior, model, theta_star,
                        std::span<const double>(kDefaultKlLadder));
}

DiscreteMeasure dirac_contamination(const DiscreteMeasure& prior,
                                    std::size_t theta, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw PreconditionError("contamination weight alpha must lie in [0, 1]");
  prior.space()->require_index(theta);
  // The endpoints are exact, with no renormalization drift.
  if (alpha == 0.0) return dirac(prior.space(), theta);
  if (alpha == 1.0) return prior;
  std::vector<double> w(prior.size(), 0.0);
  for (std::size_t i = 0; i < prior.size(); ++i) w[i] = alpha * prior.weight(i);
  w[theta] += 1.0 - alpha;
  return {prior.space(), std::move(w)};
}

DiscreteMeasure ball_evacuation(const DiscreteMeasure& prior,
                                std::size_t theta_star, double epsilon) {
  if (!(epsilon >= 0.0))
    throw PreconditionError("evacuation radius must be >= 0");
  const FiniteMetricSpace& space = *prior.space();
  space.require_index(theta_star);
  std::vector<double> w(prior.size(), 0.0);
  double outside = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (space.dist(theta_star, i) < epsilon) continue;  // open ball
    w[i] = prior.weight(i);
    outside += w[i];
  }
  if (!(outside > 0.0))
    throw PreconditionError(
        "ball evacuation is undefined: the prior carries no mass outside the "
        "open ball");
  return {prior.space(), std::move(w)};
}

namespace {

// Exact minimum set cover over <= kExactCoverLimit points, branch and bound
// on the most constrained uncovered point.
struct CoverSearch {
  const std::vector<std::uint32_t>& balls;
  std::uint32_t full;
  std::size_t best_count;
  std::vector<std::size_t> best, current;
  std::size_t max_ball_bits;

  void run() {
    current.clear();
    dfs(0u);
  }

  void dfs(std::uint32_t covered) {
    if (covered == full) {
      if (current.size() < best_count) {
        best_count = current.size();
        best = current;
      }
      return;
    }
    const std::uint32_t uncovered = full & ~covered;
    const std::size_t remaining = static_cast<std::size_t>(std::popcount(uncovered));
    if (current.size() + (remaining + max_ball_bits - 1) / max_ball_bits >=
        best_count)
      return;
    // Branch on the uncovered point reachable by the fewest balls.
    std::size_t pick = 0;
    std::size_t pick_options = std::numeric_limits<std::size_t>::max();
    for (std::size_t p = 0; p < balls.size(); ++p) {
      if (!(uncovered & (1u << p))) continue;
      std::size_t options = 0;
      for (std::size_t c = 0; c < balls.size(); ++c)
        if (balls[c] & (1u << p)) ++options;
      if (options < pick_options) {
        pick_options = options;
        pick = p;
      }
    }
    for (std::size_t c = 0; c < balls.size(); ++c) {
      if (!(balls[c] & (1u << pick))) continue;
      current.push_back(c);
      dfs(covered | balls[c]);
      current.pop_back();
    }
  }
};

// Exact maximum independent set; candidates are vertices still allowed.
struct PackingSearch {
  const std::vector<std::uint32_t>& conflicts;
  std::size_t best_count = 0;
  std::uint32_t best_set = 0;

  void dfs(std::uint32_t candidates, std::uint32_t chosen,
           std::size_t chosen_count) {
    if (chosen_count > best_count) {
      best_count = chosen_count;
      best_set = chosen;
    }
    if (candidates == 0) return;
    if (chosen_count + static_cast<std::size_t>(std::popcount(candidates)) <=
        best_count)
      return;
    // Branch on the candidate with the most remaining conflicts.
    std::size_t pick = 0;
    int pick_degree = -1;
    for (std::size_t v = 0; v < conflicts.size(); ++v) {
      if (!(candidates & (1u << v))) continue;
      const int deg = std::popcount(conflicts[v] & candidates);
      if (deg > pick_degree) {
        pick_degree = deg;
        pick = v;
      }
    }
    const std::uint32_t bit = 1u << pick;
    dfs(candidates & ~(conflicts[pick] | bit), chosen | bit, chosen_count + 1);
    dfs(candidates & ~bit, chosen, chosen_count);
  }
};

}  // namespace

CoveringCertificate covering_number(const FiniteMetricSpace& space,
                                    double epsilon) {
  if (!(epsilon > 0.0))
    throw PreconditionError("covering radius must be > 0");
  const std::size_t n = space.size();

  // Greedy cover: repeatedly take the ball that covers the most uncovered
  // points (lowest index on ties). Always a valid upper bound.
  std::vector<std::vector<std::size_t>> ball(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t j = 0; j < n; ++j)
      if (space.dist(c, j) < epsilon) ball[c].push_back(j);
  std::vector<char> covered(n, 0);
  std::size_t covered_count = 0;
  std::vector<std::size_t> centers;
  while (covered_count < n) {
    std::size_t best_c = 0, best_gain = 0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t gain = 0;
      for (std::size_t j : ball[c]) gain += !covered[j];
      if (gain > best_gain) {
        best_gain = gain;
        best_c = c;
      }
    }
    centers.push_back(best_c);
    for (std::size_t j : ball[best_c])
      if (!covered[j]) {
        covered[j] = 1;
        ++covered_count;
      }
  }

  bool exact = false;
  if (n <= kExactCoverLimit) {
    std::vector<std::uint32_t> masks(n, 0);
    std::size_t max_bits = 1;
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t j : ball[c]) masks[c] |= (1u << j);
      max_bits = std::max<std::size_t>(
          max_bits, static_cast<std::size_t>(std::popcount(masks[c])));
    }
    CoverSearch search{masks, n == 32 ? ~0u : ((1u << n) - 1u), centers.size(),
                       centers, {}, max_bits};
    search.run();
    centers = search.best;
    exact = true;
  }

  // Re-validate the certificate.
  std::vector<char> check(n, 0);
  for (std::size_t c : centers)
    for (std::size_t j : ball[c]) check[j] = 1;
  for (std::size_t j = 0; j < n; ++j)
    if (!check[j])
      throw InvariantError("covering certificate fails to cover point " +
                           std::to_string(j));

  CoveringCertificate cert;
  cert.epsilon = epsilon;
  cert.centers = IndexSet(centers);
  cert.count = centers.size();
  cert.exact = exact;
  return cert;
}

PackingCertificate packing_number(const FiniteMetricSpace& space,
                                  double epsilon) {
  if (!(epsilon > 0.0))
    throw PreconditionError("packing separation must be > 0");
  const std::size_t n = space.size();

  // Greedy maximal packing in index order: a valid lower bound.
  std::vector<std::size_t> points;
  for (std::size_t i = 0; i < n; ++i) {
    bool ok = true;
    for (std::size_t p : points)
      if (space.dist(i, p) < epsilon) {
        ok = false;
        break;
      }
    if (ok) points.push_back(i);
  }

  bool exact = false;
  if (n <= kExactCoverLimit) {
    std::vector<std::uint32_t> conflicts(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && space.dist(i, j) < epsilon) conflicts[i] |= (1u << j);
    PackingSearch search{conflicts};
    search.best_count = points.size();
    std::uint32_t greedy_mask = 0;
    for (std::size_t p : points) greedy_mask |= (1u << p);
    search.best_set = greedy_mask;
    search.dfs(n == 32 ? ~0u : ((1u << n) - 1u), 0u, 0);
    points.clear();
    for (std::size_t v = 0; v < n; ++v)
      if (search.best_set & (1u << v)) points.push_back(v);
    exact = true;
  }

  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (space.dist(points[a], points[b]) < epsilon)
        throw InvariantError("packing certificate violates the separation");

  PackingCertificate cert;
  cert.epsilon = epsilon;
  cert.points = IndexSet(points);
  cert.count = points.size();
  cert.exact = exact;
  return cert;
}

std::pair<std::size_t, double> least_mass_center(const DiscreteMeasure& prior,
                                                 double epsilon) {
  if (!(epsilon > 0.0))
    throw PreconditionError("ball radius must be > 0");
  const FiniteMetricSpace& space = *prior.space();
  std::size_t best = 0;
  double best_mass = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < space.size(); ++c) {
    double mass = 0.0;
    for (std::size_t j = 0; j < space.size(); ++j)
      if (space.dist(c, j) < epsilon) mass += prior.weight(j);
    if (mass < best_mass) {
      best_mass = mass;
      best = c;
    }
  }
  const CoveringCertificate cover = covering_number(space, 2.0 * epsilon);
  if (cover.exact &&
      best_mass > 1.0 / static_cast<double>(cover.count) + 1e-12)
    throw InvariantError(
        "least-mass ball exceeds the pigeonhole bound 1/N at 2*epsilon");
  return {best, best_mass};
}

}  // namespace robayes
