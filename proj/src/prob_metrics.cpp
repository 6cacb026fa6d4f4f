#include "robayes/prob_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "robayes/parallel.hpp"

namespace robayes {

EmpiricalLaw::EmpiricalLaw(std::vector<DiscreteMeasure> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty())
    throw PreconditionError("empirical law needs at least one sample");
  for (const auto& s : samples_)
    if (s.space() != samples_.front().space())
      throw PreconditionError("empirical law samples must share one space");
}

EmpiricalLaw EmpiricalLaw::repeated(const DiscreteMeasure& m,
                                    std::size_t count) {
  if (count == 0)
    throw PreconditionError("empirical law needs at least one sample");
  return EmpiricalLaw(std::vector<DiscreteMeasure>(count, m));
}

EmpiricalLaw EmpiricalLaw::slice(std::size_t first, std::size_t count) const {
  if (first + count > samples_.size())
    throw PreconditionError("law slice out of range");
  return EmpiricalLaw(std::vector<DiscreteMeasure>(
      samples_.begin() + first, samples_.begin() + first + count));
}

PairedDistanceSample::PairedDistanceSample(std::vector<double> distances)
    : distances_(std::move(distances)) {
  if (distances_.empty())
    throw PreconditionError("paired distance sample must be nonempty");
  for (double d : distances_)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw PreconditionError("paired distances must be finite and >= 0");
}

namespace {

struct Support {
  std::vector<std::size_t> idx;
  std::vector<double> w;
};

Support support_of(const DiscreteMeasure& m) {
  Support s;
  s.idx = m.support();
  s.w.reserve(s.idx.size());
  for (std::size_t i : s.idx) s.w.push_back(m.weight(i));
  return s;
}

// Dinic max-flow with double capacities. Augmenting along a path subtracts
// the bottleneck exactly, so termination matches the integral case.
class Dinic {
 public:
  explicit Dinic(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_edge(int u, int v, double cap) {
    edges_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[v], 0.0});
    head_[v] = static_cast<int>(edges_.size()) - 1;
  }

  double max_flow(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0.0) break;
        flow += f;
      }
    }
    return flow;
  }

  /// Unrouted supply after max_flow: the sum of residual source capacities.
  /// Exact zero when every source edge saturates, unlike 1 - (flow sum).
  double source_deficit(int s) const {
    double left = 0.0;
    for (int e = head_[s]; e != -1; e = edges_[e].next) left += edges_[e].cap;
    return left;
  }

 private:
  struct Edge {
    int to;
    int next;
    double cap;
  };
  std::vector<Edge> edges_;
  std::vector<int> head_, level_, it_;
  std::vector<int> queue_;

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    queue_.clear();
    queue_.push_back(s);
    level_[s] = 0;
    for (std::size_t q = 0; q < queue_.size(); ++q) {
      const int u = queue_[q];
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0.0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          queue_.push_back(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    for (int& e = it_[u]; e != -1; e = edges_[e].next) {
      Edge& ed = edges_[e];
      if (ed.cap > 0.0 && level_[ed.to] == level_[u] + 1) {
        const double f = dfs(ed.to, t, std::min(limit, ed.cap));
        if (f > 0.0) {
          ed.cap -= f;
          edges_[e ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0.0;
  }
};

// One side is a point mass: the couplable mass at threshold t is just the
// other measure's mass within distance t of the point, no flow needed.
double prokhorov_to_point(const FiniteMetricSpace& space, const Support& s,
                          std::size_t point) {
  std::vector<std::pair<double, double>> by_dist;  // (distance, weight)
  by_dist.reserve(s.idx.size());
  for (std::size_t k = 0; k < s.idx.size(); ++k)
    by_dist.emplace_back(space.dist(s.idx[k], point), s.w[k]);
  std::sort(by_dist.begin(), by_dist.end());
  double best = 1.0;  // eps = 1 is always admissible
  double cum = 0.0;
  std::size_t i = 0;
  while (i < by_dist.size()) {
    const double t = by_dist[i].first;
    while (i < by_dist.size() && by_dist[i].first == t) cum += by_dist[i++].second;
    best = std::min(best, std::max(t, 1.0 - cum));
  }
  return std::max(best, 0.0);
}

struct PairEdge {
  double d;
  int a;
  int b;
};

double prokhorov_general(const FiniteMetricSpace& space, const Support& sa,
                         const Support& sb) {
  const int na = static_cast<int>(sa.idx.size());
  const int nb = static_cast<int>(sb.idx.size());
  std::vector<PairEdge> edges;
  edges.reserve(static_cast<std::size_t>(na) * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      edges.push_back({space.dist(sa.idx[i], sb.idx[j]), i, j});
  std::sort(edges.begin(), edges.end(),
            [](const PairEdge& x, const PairEdge& y) { return x.d < y.d; });

  // Distinct thresholds with the count of edges admitted at each.
  std::vector<double> thr;
  std::vector<std::size_t> admitted;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (e + 1 == edges.size() || edges[e + 1].d != edges[e].d) {
      thr.push_back(edges[e].d);
      admitted.push_back(e + 1);
    }
  }
  const std::size_t num_thr = thr.size();

  const int source = 0;
  const int sink = na + nb + 1;
  auto deficit_at = [&](std::size_t k) {
    Dinic net(na + nb + 2);
    for (int i = 0; i < na; ++i) net.add_edge(source, 1 + i, sa.w[i]);
    for (int j = 0; j < nb; ++j) net.add_edge(1 + na + j, sink, sb.w[j]);
    for (std::size_t e = 0; e < admitted[k]; ++e)
      net.add_edge(1 + edges[e].a, 1 + na + edges[e].b,
                   std::min(sa.w[edges[e].a], sb.w[edges[e].b]));
    net.max_flow(source, sink);
    return net.source_deficit(source);
  };

  // The uncouplable mass 1 - F(t) is nonincreasing in t, so the feasibility
  // predicate 1 - F(t) <= t is monotone: bisect for the first feasible
  // threshold.
  std::vector<double> memo(num_thr, -1.0);
  auto deficit = [&](std::size_t k) {
    if (memo[k] < 0.0) memo[k] = deficit_at(k);
    return memo[k];
  };
  std::ptrdiff_t lo = -1;  // known infeasible
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(num_thr) - 1;  // feasible
  while (hi - lo > 1) {
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    if (deficit(static_cast<std::size_t>(mid)) <= thr[mid])
      hi = mid;
    else
      lo = mid;
  }
  // The optimum sits either at the first feasible threshold or inside the
  // interval just below it, at eps = 1 - F of the preceding threshold.
  const double below = lo >= 0 ? deficit(static_cast<std::size_t>(lo)) : 1.0;
  return std::max(0.0, std::min({thr[hi], below, 1.0}));
}

}  // namespace

double prokhorov(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  detail::require_same_space(mu, nu);
  if (mu.weights().data() == nu.weights().data() || mu == nu) return 0.0;
  const FiniteMetricSpace& space = *mu.space();
  const Support sa = support_of(mu);
  const Support sb = support_of(nu);
  if (sa.idx.size() == 1 && sb.idx.size() == 1)
    return std::min(1.0, space.dist(sa.idx[0], sb.idx[0]));
  if (sa.idx.size() == 1) return prokhorov_to_point(space, sb, sa.idx[0]);
  if (sb.idx.size() == 1) return prokhorov_to_point(space, sa, sb.idx[0]);
  return prokhorov_general(space, sa, sb);
}

namespace {

// min over thresholds t of max(t, max_A [mu(A) - nu(A^{<=t})]) with A
// ranging over subsets of mu's support; equals the defining infimum.
double oracle_one_sided(const FiniteMetricSpace& space, const Support& sa,
                        const Support& sb) {
  const std::size_t na = sa.idx.size();
  const std::size_t nb = sb.idx.size();
  std::vector<double> thr;
  thr.push_back(0.0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      thr.push_back(space.dist(sa.idx[i], sb.idx[j]));
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  const std::size_t num_thr = thr.size();

  std::vector<double> phi(num_thr, 0.0);  // empty A contributes 0
  std::vector<std::pair<double, double>> reach(nb);  // (min dist to A, weight)
  for (std::uint32_t mask = 1; mask < (1u << na); ++mask) {
    double mu_a = 0.0;
    for (std::size_t i = 0; i < na; ++i)
      if (mask & (1u << i)) mu_a += sa.w[i];
    for (std::size_t j = 0; j < nb; ++j) {
      double md = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < na; ++i)
        if (mask & (1u << i))
          md = std::min(md, space.dist(sa.idx[i], sb.idx[j]));
      reach[j] = {md, sb.w[j]};
    }
    std::sort(reach.begin(), reach.end());
    double nu_mass = 0.0;
    std::size_t p = 0;
    for (std::size_t k = 0; k < num_thr; ++k) {
      while (p < nb && reach[p].first <= thr[k]) nu_mass += reach[p++].second;
      phi[k] = std::max(phi[k], mu_a - nu_mass);
    }
  }

  double best = 1.0;
  for (std::size_t k = 0; k < num_thr; ++k)
    best = std::min(best, std::max(thr[k], phi[k]));
  return std::max(best, 0.0);
}

}  // namespace

double prokhorov_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  detail::require_same_space(mu, nu);
  const Support sa = support_of(mu);
  const Support sb = support_of(nu);
  if (sa.idx.size() > 15 || sb.idx.size() > 15)
    throw PreconditionError(
        "prokhorov_oracle enumerates subsets; supports must have <= 15 points");
  const FiniteMetricSpace& space = *mu.space();
  return std::max(oracle_one_sided(space, sa, sb),
                  oracle_one_sided(space, sb, sa));
}

double ky_fan_empirical(std::span<const double> distances) {
  if (distances.empty())
    throw PreconditionError("ky_fan_empirical needs at least one distance");
  std::vector<double> d(distances.begin(), distances.end());
  for (double v : d)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw PreconditionError("distances must be finite and >= 0");
  std::sort(d.begin(), d.end());
  const double n = static_cast<double>(d.size());
  double best = 1.0;  // P(d > 1) <= 1 always holds
  std::size_t i = 0;
  while (i < d.size()) {
    std::size_t j = i;
    while (j < d.size() && d[j] == d[i]) ++j;
    const double frac_gt = static_cast<double>(d.size() - j) / n;
    best = std::min(best, std::max(d[i], frac_gt));
    i = j;
  }
  return best;
}

double ky_fan_empirical(const PairedDistanceSample& sample) {
  return ky_fan_empirical(sample.distances());
}

SpacePtr meta_space(const EmpiricalLaw& a, const EmpiricalLaw& b, int threads) {
  if (a.space() != b.space())
    throw PreconditionError("laws live on different spaces");
  const std::size_t ma = a.size();
  const std::size_t n = ma + b.size();
  auto point = [&](std::size_t i) -> const DiscreteMeasure& {
    return i < ma ? a[i] : b[i - ma];
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<double> dist(n * n, 0.0);
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double d = prokhorov(point(i), point(j));
    dist[i * n + j] = d;
    dist[j * n + i] = d;
  });

  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < ma; ++i) labels.push_back("a" + std::to_string(i));
  for (std::size_t i = ma; i < n; ++i)
    labels.push_back("b" + std::to_string(i - ma));
  // The constructor re-checks the metric axioms; a triangle violation here
  // means the pairwise Prokhorov values are inconsistent.
  return make_space(std::move(labels), std::move(dist));
}

namespace detail {

double prokhorov_between_uniform_blocks(const SpacePtr& meta,
                                        std::size_t m_left) {
  const std::size_t n = meta->size();
  if (m_left == 0 || m_left >= n)
    throw PreconditionError("uniform blocks must both be nonempty");
  std::vector<double> wl(n, 0.0), wr(n, 0.0);
  for (std::size_t i = 0; i < m_left; ++i)
    wl[i] = 1.0 / static_cast<double>(m_left);
  for (std::size_t i = m_left; i < n; ++i)
    wr[i] = 1.0 / static_cast<double>(n - m_left);
  return prokhorov(DiscreteMeasure(meta, std::move(wl)),
                   DiscreteMeasure(meta, std::move(wr)));
}

}  // namespace detail

double meta_prokhorov(const EmpiricalLaw& a, const EmpiricalLaw& b,
                      int threads) {
  return detail::prokhorov_between_uniform_blocks(meta_space(a, b, threads),
                                                  a.size());
}

double ky_fan_to_dirac(const EmpiricalLaw& law, const DiscreteMeasure& target,
                       int threads) {
  if (law.space() != target.space())
    throw PreconditionError("law and target live on different spaces");
  std::vector<double> d(law.size());
  parallel_for(law.size(), threads,
               [&](std::size_t i) { d[i] = prokhorov(law[i], target); });
  return ky_fan_empirical(d);
}

}  // namespace robayes
