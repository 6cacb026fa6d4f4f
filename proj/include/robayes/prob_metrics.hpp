#pragma once

#include <span>
#include <vector>

#include "robayes/measures.hpp"

namespace robayes {

/// A uniformly weighted finite sample of measures on one common space; the
/// Monte Carlo stand-in for a distribution over posteriors.
class EmpiricalLaw {
 public:
  explicit EmpiricalLaw(std::vector<DiscreteMeasure> samples);
  static EmpiricalLaw repeated(const DiscreteMeasure& m, std::size_t count);

  std::size_t size() const noexcept { return samples_.size(); }
  const DiscreteMeasure& sample(std::size_t i) const { return samples_[i]; }
  const DiscreteMeasure& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<DiscreteMeasure>& samples() const noexcept { return samples_; }
  const SpacePtr& space() const noexcept { return samples_.front().space(); }

  /// Contiguous block [first, first+count) as its own law.
  EmpiricalLaw slice(std::size_t first, std::size_t count) const;

 private:
  std::vector<DiscreteMeasure> samples_;
};

/// Distances between coupled sample pairs; the empirical carrier of the
/// Ky Fan distance between two measure-valued random variables.
class PairedDistanceSample {
 public:
  explicit PairedDistanceSample(std::vector<double> distances);
  std::span<const double> distances() const noexcept { return distances_; }
  std::size_t size() const noexcept { return distances_.size(); }

 private:
  std::vector<double> distances_;
};

/// Exact Prokhorov distance between two measures on one space, in
/// [0, min(1, diameter)]. Computed from the coupling characterization:
/// scan candidate thresholds t over the support-to-support distances, get
/// the maximum couplable mass F(t) across pairs with d <= t from a max-flow
/// feasibility solve, and take min_t max(t, 1 - F(t)) (capped by the always
/// admissible eps = 1).
double prokhorov(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Ground-truth Prokhorov by direct subset enumeration of the defining
/// inequalities mu(A) <= nu(A^eps) + eps. Exponential in the support size;
/// requires both supports <= 15 points. Both argument orders are evaluated
/// and the maximum taken.
double prokhorov_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Smallest eps with (1/N) #{d_i > eps} <= eps, computed exactly by
/// sorting; always in [0, 1].
double ky_fan_empirical(std::span<const double> distances);
double ky_fan_empirical(const PairedDistanceSample& sample);

/// The meta-space of two laws: one point per sample, metric = pairwise
/// Prokhorov on the base space. The distance matrix may be filled by
/// parallel workers; results are identical to the sequential order.
SpacePtr meta_space(const EmpiricalLaw& a, const EmpiricalLaw& b,
                    int threads = 1);

/// Second-order Prokhorov distance between two empirical laws: Prokhorov
/// between the uniform empirical measures on their joint meta-space.
double meta_prokhorov(const EmpiricalLaw& a, const EmpiricalLaw& b,
                      int threads = 1);

/// Ky Fan distance from a law to a constant: ky_fan_empirical of the
/// Prokhorov distances sample_i -> target. Coincides with
/// meta_prokhorov(law, {target}) on empirical data.
double ky_fan_to_dirac(const EmpiricalLaw& law, const DiscreteMeasure& target,
                       int threads = 1);

namespace detail {
/// Prokhorov between the uniform measure on the first m_left points of
/// `meta` and the uniform measure on the rest.
double prokhorov_between_uniform_blocks(const SpacePtr& meta,
                                        std::size_t m_left);
}  // namespace detail

}  // namespace robayes
