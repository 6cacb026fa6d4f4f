#pragma once

#include <span>
#include <vector>

#include "robayes/metric_space.hpp"

namespace robayes {

/// A discrete probability measure on a FiniteMetricSpace: one nonnegative
/// weight per point, renormalized to total mass 1 on construction. Values
/// are immutable; all operations are pure.
class DiscreteMeasure {
 public:
  static constexpr double kMassSlack = 1e-12;

  DiscreteMeasure(SpacePtr space, std::vector<double> weights);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  double mass(const IndexSet& a) const;
  /// Indices carrying strictly positive weight.
  std::vector<std::size_t> support() const;

  bool operator==(const DiscreteMeasure& other) const {
    return space_ == other.space_ && weights_ == other.weights_;
  }

 private:
  SpacePtr space_;
  std::vector<double> weights_;
};

/// Point mass at index i.
DiscreteMeasure dirac(SpacePtr space, std::size_t i);

/// sup_A |mu(A) - nu(A)| = half the L1 distance between the weight vectors.
double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Kullback-Leibler divergence sum_i mu_i log(mu_i/nu_i), natural log,
/// with 0 log 0 = 0. Returns +infinity when mu is not absolutely
/// continuous w.r.t. nu; infinity is a value, not an error.
double kl_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// sqrt(1/2 sum_i (sqrt(mu_i) - sqrt(nu_i))^2), in [0, 1].
double hellinger(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

namespace detail {
void require_same_space(const DiscreteMeasure& a, const DiscreteMeasure& b);
}

}  // namespace robayes
