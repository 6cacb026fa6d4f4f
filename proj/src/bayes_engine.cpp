#include "robayes/bayes_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "robayes/parallel.hpp"

namespace robayes {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

CategoricalModel::CategoricalModel(SpacePtr theta_space, std::size_t outcomes,
                                   std::vector<double> likelihood_rows)
    : theta_(std::move(theta_space)),
      outcomes_(outcomes),
      lik_(std::move(likelihood_rows)) {
  if (!theta_) throw PreconditionError("model needs a parameter space");
  if (outcomes_ < 2)
    throw ConfigError("model needs at least two outcomes");
  if (lik_.size() != theta_->size() * outcomes_)
    throw ConfigError("likelihood matrix shape does not match grid x outcomes");
  for (std::size_t t = 0; t < theta_->size(); ++t) {
    double sum = 0.0;
    for (std::size_t x = 0; x < outcomes_; ++x) {
      const double p = lik_[t * outcomes_ + x];
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ConfigError("likelihood entries must be finite and >= 0");
      sum += p;
    }
    if (!(sum > 0.0))
      throw ConfigError("likelihood row " + std::to_string(t) + " has no mass");
    if (sum != 1.0)
      for (std::size_t x = 0; x < outcomes_; ++x) lik_[t * outcomes_ + x] /= sum;
  }
  for (std::size_t a = 0; a < theta_->size(); ++a)
    for (std::size_t b = a + 1; b < theta_->size(); ++b) {
      bool same = true;
      for (std::size_t x = 0; x < outcomes_ && same; ++x)
        same = lik_[a * outcomes_ + x] == lik_[b * outcomes_ + x];
      if (same)
        throw ConfigError("model is not injective: grid points " +
                          std::to_string(a) + " and " + std::to_string(b) +
                          " share one likelihood row");
    }
  log_lik_.resize(lik_.size());
  for (std::size_t k = 0; k < lik_.size(); ++k)
    log_lik_[k] = lik_[k] > 0.0 ? std::log(lik_[k]) : kNegInf;
}

DiscreteMeasure CategoricalModel::row_measure(const SpacePtr& outcome_space,
                                              std::size_t theta) const {
  theta_->require_index(theta);
  auto r = row(theta);
  return {outcome_space, std::vector<double>(r.begin(), r.end())};
}

double CategoricalModel::model_kl(std::size_t i, std::size_t j) const {
  theta_->require_index(i);
  theta_->require_index(j);
  double kl = 0.0;
  for (std::size_t x = 0; x < outcomes_; ++x) {
    const double p = likelihood(i, x);
    if (p == 0.0) continue;
    const double q = likelihood(j, x);
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    kl += p * std::log(p / q);
  }
  return kl < 0.0 ? 0.0 : kl;
}

CategoricalModel make_bernoulli_grid_model(const std::vector<double>& thetas) {
  for (double t : thetas)
    if (!(t >= 0.0 && t <= 1.0))
      throw ConfigError("Bernoulli grid values must lie in [0, 1]");
  std::vector<double> rows;
  rows.reserve(thetas.size() * 2);
  for (double t : thetas) {
    rows.push_back(1.0 - t);
    rows.push_back(t);
  }
  return {build_line_space(thetas), 2, std::move(rows)};
}

CategoricalModel make_product_bernoulli_model(
    const std::vector<double>& theta1_grid,
    const std::vector<double>& theta2_grid, double base2, double slope2) {
  if (theta1_grid.empty() || theta2_grid.empty())
    throw ConfigError("product model needs nonempty factor grids");
  std::vector<std::vector<double>> coords;
  std::vector<double> rows;
  coords.reserve(theta1_grid.size() * theta2_grid.size());
  for (double t1 : theta1_grid) {
    if (!(t1 >= 0.0 && t1 <= 1.0))
      throw ConfigError("theta1 values must lie in [0, 1]");
    for (double t2 : theta2_grid) {
      const double q2 = base2 + slope2 * t2;
      if (!(q2 >= 0.0 && q2 <= 1.0))
        throw ConfigError("base2 + slope2*theta2 must lie in [0, 1]");
      coords.push_back({t1, t2});
      // outcome = 2*x1 + x2
      rows.push_back((1.0 - t1) * (1.0 - q2));
      rows.push_back((1.0 - t1) * q2);
      rows.push_back(t1 * (1.0 - q2));
      rows.push_back(t1 * q2);
    }
  }
  return {build_grid_space(coords), 4, std::move(rows)};
}

CategoricalModel make_gaussian_bin_model(const std::vector<double>& grid,
                                         double sigma, std::size_t bins,
                                         double x_min, double x_max) {
  if (grid.empty()) throw ConfigError("location model needs a nonempty grid");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (bins < 2) throw ConfigError("location model needs at least two bins");
  if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");
  const double width = (x_max - x_min) / static_cast<double>(bins);
  auto cdf = [&](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  std::vector<double> rows;
  rows.reserve(grid.size() * bins);
  for (double theta : grid) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double lo = (x_min + width * static_cast<double>(b) - theta) / sigma;
      const double hi = (x_min + width * static_cast<double>(b + 1) - theta) / sigma;
      rows.push_back(std::max(cdf(hi) - cdf(lo), 0.0));
    }
  }
  // Row normalization inside the constructor conditions each row on the
  // observation window [x_min, x_max].
  return {build_line_space(grid), bins, std::move(rows)};
}

Dataset sample_data(const CategoricalModel& model, std::size_t theta_index,
                    std::size_t n, RngStream& rng) {
  model.theta_space()->require_index(theta_index);
  const std::size_t m = model.outcomes();
  std::vector<double> cdf(m);
  double cum = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    cum += model.likelihood(theta_index, x);
    cdf[x] = cum;
  }
  cdf[m - 1] = 1.0;
  Dataset out;
  out.draws.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.next_unit();
    const std::size_t x = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    out.draws.push_back(static_cast<std::uint32_t>(std::min(x, m - 1)));
  }
  return out;
}

Dataset sample_data(const CategoricalModel& model, std::size_t theta_index,
                    std::size_t n, const RngSeed& seed,
                    std::uint64_t replicate) {
  RngStream rng(seed, replicate);
  return sample_data(model, theta_index, n, rng);
}

DiscreteMeasure posterior(const DiscreteMeasure& prior,
                          const CategoricalModel& model, const Dataset& data) {
  if (prior.space() != model.theta_space())
    throw PreconditionError("prior must live on the model's parameter space");
  if (data.draws.empty()) return prior;

  const std::size_t m = model.outcomes();
  std::vector<std::uint64_t> counts(m, 0);
  for (std::uint32_t x : data.draws) {
    if (x >= m) throw PreconditionError("dataset contains an invalid outcome");
    ++counts[x];
  }

  const std::size_t g = model.grid_size();
  std::vector<double> log_w(g, kNegInf);
  double max_log = kNegInf;
  for (std::size_t t = 0; t < g; ++t) {
    const double pw = prior.weight(t);
    if (pw == 0.0) continue;
    double ll = std::log(pw);
    for (std::size_t x = 0; x < m; ++x) {
      if (counts[x] == 0) continue;
      const double lx = model.log_likelihood(t, x);
      if (lx == kNegInf) {
        ll = kNegInf;
        break;
      }
      ll += static_cast<double>(counts[x]) * lx;
    }
    log_w[t] = ll;
    max_log = std::max(max_log, ll);
  }
  if (max_log == kNegInf)
    throw PreconditionError(
        "posterior mass is zero: the prior and the likelihood of the observed "
        "data are mutually singular");

  std::vector<double> w(g, 0.0);
  for (std::size_t t = 0; t < g; ++t)
    if (log_w[t] != kNegInf) w[t] = std::exp(log_w[t] - max_log);
  return {prior.space(), std::move(w)};
}

EmpiricalLaw posterior_law(const DiscreteMeasure& prior,
                           const CategoricalModel& model,
                           std::size_t data_theta, std::size_t n,
                           std::size_t replicates, const RngSeed& seed,
                           int threads) {
  if (replicates == 0)
    throw PreconditionError("posterior_law needs at least one replicate");
  std::vector<std::optional<DiscreteMeasure>> slots(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const Dataset data = sample_data(model, data_theta, n, seed, r);
    slots[r] = posterior(prior, model, data);
  });
  std::vector<DiscreteMeasure> samples;
  samples.reserve(replicates);
  for (auto& s : slots) samples.push_back(std::move(*s));
  return EmpiricalLaw(std::move(samples));
}

PairedDistanceSample coupled_posterior_distances(
    const DiscreteMeasure& prior1, const DiscreteMeasure& prior2,
    const CategoricalModel& model, std::size_t data_theta, std::size_t n,
    std::size_t replicates, const RngSeed& seed, int threads) {
  if (replicates == 0)
    throw PreconditionError("coupled run needs at least one replicate");
  if (prior1.space() != model.theta_space() ||
      prior2.space() != model.theta_space())
    throw PreconditionError("priors must live on the model's parameter space");
  std::vector<double> d(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const Dataset data = sample_data(model, data_theta, n, seed, r);
    d[r] = prokhorov(posterior(prior1, model, data),
                     posterior(prior2, model, data));
  });
  return PairedDistanceSample(std::move(d));
}

}  // namespace robayes
