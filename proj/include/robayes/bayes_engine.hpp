#pragma once

#include <cstdint>
#include <vector>

#include "robayes/measures.hpp"
#include "robayes/prob_metrics.hpp"
#include "robayes/rng.hpp"

namespace robayes {

/// Dominated categorical model on a gridded parameter space: one
/// row-stochastic likelihood row p(.|theta) per grid point, densities taken
/// w.r.t. counting measure on a finite outcome set. Rows are renormalized on
/// construction; two identical rows reject the model (the inference
/// machinery assumes an injective model map).
class CategoricalModel {
 public:
  CategoricalModel(SpacePtr theta_space, std::size_t outcomes,
                   std::vector<double> likelihood_rows);

  const SpacePtr& theta_space() const noexcept { return theta_; }
  std::size_t grid_size() const noexcept { return theta_->size(); }
  std::size_t outcomes() const noexcept { return outcomes_; }
  double likelihood(std::size_t theta, std::size_t x) const {
    return lik_[theta * outcomes_ + x];
  }
  double log_likelihood(std::size_t theta, std::size_t x) const {
    return log_lik_[theta * outcomes_ + x];
  }
  std::span<const double> row(std::size_t theta) const {
    return {lik_.data() + theta * outcomes_, outcomes_};
  }
  DiscreteMeasure row_measure(const SpacePtr& outcome_space,
                              std::size_t theta) const;

  /// KL divergence between the outcome distributions of two grid points,
  /// K(theta_i, theta_j) = sum_x p(x|i) log(p(x|i)/p(x|j)).
  double model_kl(std::size_t i, std::size_t j) const;

 private:
  SpacePtr theta_;
  std::size_t outcomes_;
  std::vector<double> lik_;      // grid x outcomes, row-major
  std::vector<double> log_lik_;  // -inf where the likelihood vanishes
};

/// i.i.d. outcome indices.
struct Dataset {
  std::vector<std::uint32_t> draws;
  std::size_t size() const noexcept { return draws.size(); }
};

/// Bernoulli likelihoods [1-theta, theta] over a 1-d grid in [0, 1].
CategoricalModel make_bernoulli_grid_model(const std::vector<double>& thetas);

/// Two independent Bernoulli factors observed jointly; outcome index is
/// 2*x1 + x2 with x1 ~ Ber(theta1) and x2 ~ Ber(base2 + slope2*theta2).
/// The theta2 = 0 slice serves as a restricted submodel.
CategoricalModel make_product_bernoulli_model(
    const std::vector<double>& theta1_grid,
    const std::vector<double>& theta2_grid, double base2, double slope2);

/// Location model with binned Gaussian outcome densities: outcome x is one
/// of `bins` equal cells of [x_min, x_max], p(x|theta) proportional to the
/// N(theta, sigma^2) mass of the cell. Scales to grids of any diameter.
CategoricalModel make_gaussian_bin_model(const std::vector<double>& grid,
                                         double sigma, std::size_t bins,
                                         double x_min, double x_max);

/// n i.i.d. draws from row theta_index; deterministic in (seed, replicate).
Dataset sample_data(const CategoricalModel& model, std::size_t theta_index,
                    std::size_t n, const RngSeed& seed,
                    std::uint64_t replicate = 0);
Dataset sample_data(const CategoricalModel& model, std::size_t theta_index,
                    std::size_t n, RngStream& rng);

/// Exact Bayes for the dominated model: weights proportional to
/// prior_i * prod_k p(x_k|i), accumulated in log space with max
/// subtraction. Empty data returns the prior. A posterior with zero total
/// mass (prior and likelihood mutually singular) is an error, never a
/// silent renormalization.
DiscreteMeasure posterior(const DiscreteMeasure& prior,
                          const CategoricalModel& model, const Dataset& data);

/// M replicates of (draw x^n from P_theta, condition the prior): the Monte
/// Carlo image of the sampling distribution of the posterior. Replicates own
/// counter-derived RNG streams, so the result is bit-identical for any
/// thread count.
EmpiricalLaw posterior_law(const DiscreteMeasure& prior,
                           const CategoricalModel& model,
                           std::size_t data_theta, std::size_t n,
                           std::size_t replicates, const RngSeed& seed,
                           int threads = 1);

/// Per replicate, one shared dataset conditions both priors; returns the
/// Prokhorov distances between the paired posteriors.
PairedDistanceSample coupled_posterior_distances(
    const DiscreteMeasure& prior1, const DiscreteMeasure& prior2,
    const CategoricalModel& model, std::size_t data_theta, std::size_t n,
    std::size_t replicates, const RngSeed& seed, int threads = 1);

}  // namespace robayes
