#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "robayes/bayes_engine.hpp"
#include "robayes/measures.hpp"

namespace robayes {

/// Grid points whose model KL divergence from the center is <= epsilon.
struct KLNeighborhood {
  std::size_t center = 0;
  double epsilon = 0.0;
  IndexSet members;
};

/// A set of open epsilon-balls covering the whole space. `exact` marks a
/// certified minimum; otherwise the count is a greedy upper bound.
struct CoveringCertificate {
  double epsilon = 0.0;
  IndexSet centers;
  std::size_t count = 0;
  bool exact = false;
};

/// An epsilon-separated point set. `exact` marks a certified maximum;
/// otherwise the count is a greedy lower bound.
struct PackingCertificate {
  double epsilon = 0.0;
  IndexSet points;
  std::size_t count = 0;
  bool exact = false;
};

/// Exact search is limited to spaces of this size; beyond it the covering
/// and packing routines fall back to greedy bounds and clear the flag.
inline constexpr std::size_t kExactCoverLimit = 24;

/// Default epsilon ladder for deciding Kullback-Leibler support on a grid.
inline constexpr double kDefaultKlLadder[] = {1.0, 0.1, 0.01, 0.001};

/// K_eps(theta*) = { theta' : K(theta*, theta') <= eps }.
KLNeighborhood kl_neighborhood(const CategoricalModel& model,
                               std::size_t theta_star, double epsilon);

/// True iff the prior gives positive mass to K_eps(theta*) for every eps in
/// the ladder (nonempty, positive, strictly decreasing). On a finite grid
/// the smallest ladder value decides; the ladder documents the scale at
/// which the answer stabilized.
bool has_kl_support(const DiscreteMeasure& prior, const CategoricalModel& model,
                    std::size_t theta_star, std::span<const double> ladder);
bool has_kl_support(const DiscreteMeasure& prior, const CategoricalModel& model,
                    std::size_t theta_star);

/// Convex combination alpha * prior + (1 - alpha) * dirac(theta): total
/// variation at most alpha from the point mass while inheriting the prior's
/// KL support wherever alpha > 0.
DiscreteMeasure dirac_contamination(const DiscreteMeasure& prior,
                                    std::size_t theta, double alpha);

/// Remove all mass inside the open epsilon-ball around theta_star and
/// renormalize the rest. TV distance to the input equals the evacuated mass.
DiscreteMeasure ball_evacuation(const DiscreteMeasure& prior,
                                std::size_t theta_star, double epsilon);

/// Minimum number of open epsilon-balls centered on grid points that cover
/// the space. Exact branch-and-bound when size <= kExactCoverLimit, greedy
/// upper bound otherwise; the certificate is re-validated either way.
CoveringCertificate covering_number(const FiniteMetricSpace& space,
                                    double epsilon);

/// Maximum number of points with pairwise distance >= epsilon. Exact
/// branch-and-bound when size <= kExactCoverLimit, greedy lower bound
/// otherwise.
PackingCertificate packing_number(const FiniteMetricSpace& space,
                                  double epsilon);

/// The grid point whose open epsilon-ball carries the least prior mass,
/// together with that mass. When the covering number N at 2*epsilon is
/// exact, the returned mass provably satisfies mass <= 1/N; this is checked.
std::pair<std::size_t, double> least_mass_center(const DiscreteMeasure& prior,
                                                 double epsilon);

}  // namespace robayes
