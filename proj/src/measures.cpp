#include "robayes/measures.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace robayes {

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_) throw PreconditionError("measure needs a space");
  if (weights_.size() != space_->size())
    throw PreconditionError("weight vector length does not match space size");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw PreconditionError("weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0))
    throw PreconditionError("total mass must be strictly positive");
  // Renormalize; afterwards the total is 1 within kMassSlack.
  if (sum != 1.0)
    for (double& w : weights_) w /= sum;
}

double DiscreteMeasure::mass(const IndexSet& a) const {
  double s = 0.0;
  for (std::size_t i : a) {
    space_->require_index(i);
    s += weights_[i];
  }
  return s;
}

std::vector<std::size_t> DiscreteMeasure::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) out.push_back(i);
  return out;
}

DiscreteMeasure dirac(SpacePtr space, std::size_t i) {
  if (!space) throw PreconditionError("dirac needs a space");
  space->require_index(i);
  std::vector<double> w(space->size(), 0.0);
  w[i] = 1.0;
  return {std::move(space), std::move(w)};
}

namespace detail {
void require_same_space(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.space() != b.space())
    throw PreconditionError("measures live on different spaces");
}
}  // namespace detail

double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  detail::require_same_space(mu, nu);
  double l1 = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    l1 += std::fabs(mu.weight(i) - nu.weight(i));
  return 0.5 * l1;
}

double kl_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  detail::require_same_space(mu, nu);
  double kl = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double p = mu.weight(i);
    if (p == 0.0) continue;
    const double q = nu.weight(i);
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    kl += p * std::log(p / q);
  }
  return kl < 0.0 ? 0.0 : kl;  // clip the tiny negative round-off at mu == nu
}

double hellinger(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  detail::require_same_space(mu, nu);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = std::sqrt(mu.weight(i)) - std::sqrt(nu.weight(i));
    s += d * d;
  }
  return std::sqrt(0.5 * s);
}

}  // namespace robayes
