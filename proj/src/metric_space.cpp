#include "robayes/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

namespace robayes {

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels,
                                     std::vector<double> dist)
    : labels_(std::move(labels)), dist_(std::move(dist)), n_(labels_.size()) {
  if (n_ == 0) throw PreconditionError("metric space must be nonempty");
  if (dist_.size() != n_ * n_)
    throw PreconditionError("distance matrix size does not match point count");
  validate();
  diameter_ = 0.0;
  for (double d : dist_) diameter_ = std::max(diameter_, d);
}

void FiniteMetricSpace::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (dist(i, i) != 0.0)
      throw InvariantError("metric space: dist(i,i) must be 0 at " +
                           std::to_string(i));
    for (std::size_t j = 0; j < n_; ++j) {
      const double dij = dist(i, j);
      if (!(dij >= 0.0) || !std::isfinite(dij))
        throw InvariantError("metric space: distances must be finite and >= 0");
      if (dij != dist(j, i))
        throw InvariantError("metric space: distance matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const double dij = dist(i, j);
      for (std::size_t k = 0; k < n_; ++k)
        if (dist(i, k) > dij + dist(j, k) + kTriangleSlack)
          throw InvariantError("metric space: triangle inequality violated at (" +
                               std::to_string(i) + "," + std::to_string(j) + "," +
                               std::to_string(k) + ")");
    }
}

void FiniteMetricSpace::require_index(std::size_t i) const {
  if (i >= n_)
    throw PreconditionError("point index " + std::to_string(i) +
                            " out of range for space of size " +
                            std::to_string(n_));
}

FiniteMetricSpace FiniteMetricSpace::subspace(
    std::span<const std::size_t> indices) const {
  std::vector<std::string> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    require_index(i);
    labels.push_back(labels_[i]);
  }
  std::vector<double> d(indices.size() * indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = 0; b < indices.size(); ++b)
      d[a * indices.size() + b] = dist(indices[a], indices[b]);
  return {std::move(labels), std::move(d)};
}

IndexSet::IndexSet(std::vector<std::size_t> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

IndexSet::IndexSet(std::initializer_list<std::size_t> members)
    : IndexSet(std::vector<std::size_t>(members)) {}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

namespace {

std::string format_point(const std::vector<double>& p) {
  char buf[64];
  if (p.size() == 1) {
    std::snprintf(buf, sizeof(buf), "%.12g", p[0]);
    return buf;
  }
  std::string out = "(";
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g", p[k]);
    out += buf;
    if (k + 1 < p.size()) out += ",";
  }
  out += ")";
  return out;
}

}  // namespace

SpacePtr build_grid_space(const std::vector<std::vector<double>>& coords) {
  if (coords.empty()) throw PreconditionError("grid must have at least one point");
  const std::size_t dim = coords.front().size();
  if (dim == 0) throw PreconditionError("grid points must have dimension >= 1");
  const std::size_t n = coords.size();
  std::vector<std::string> labels;
  labels.reserve(n);
  for (const auto& p : coords) {
    if (p.size() != dim)
      throw PreconditionError("grid points must all have the same dimension");
    labels.push_back(format_point(p));
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = coords[i][k] - coords[j][k];
        s += d * d;
      }
      const double d = std::sqrt(s);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  return std::make_shared<const FiniteMetricSpace>(std::move(labels),
                                                   std::move(dist));
}

SpacePtr build_line_space(const std::vector<double>& coords) {
  std::vector<std::vector<double>> pts;
  pts.reserve(coords.size());
  for (double c : coords) pts.push_back({c});
  return build_grid_space(pts);
}

SpacePtr make_space(std::vector<std::string> labels, std::vector<double> dist) {
  return std::make_shared<const FiniteMetricSpace>(std::move(labels),
                                                   std::move(dist));
}

IndexSet enlarge(const FiniteMetricSpace& space, const IndexSet& a,
                 double epsilon, bool open_ball) {
  if (epsilon < 0.0)
    throw PreconditionError("enlargement radius must be >= 0");
  std::vector<std::size_t> out;
  for (std::size_t i : a) space.require_index(i);
  for (std::size_t j = 0; j < space.size(); ++j) {
    for (std::size_t i : a) {
      const double d = space.dist(i, j);
      if (open_ball ? d < epsilon : d <= epsilon) {
        out.push_back(j);
        break;
      }
    }
  }
  return IndexSet(std::move(out));
}

double diameter(const FiniteMetricSpace& space) { return space.diameter(); }

}  // namespace robayes
