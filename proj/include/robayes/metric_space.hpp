#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "robayes/errors.hpp"

namespace robayes {

class FiniteMetricSpace;

/// Spaces are immutable and shared; identity of the pointer is identity of
/// the space for "same space" checks on measures.
using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// A finite metric space: labelled points plus a dense symmetric distance
/// matrix. Construction validates the metric axioms (d(i,i)=0, symmetry,
/// triangle inequality up to kTriangleSlack) and caches the diameter.
class FiniteMetricSpace {
 public:
  static constexpr double kTriangleSlack = 1e-9;

  FiniteMetricSpace(std::vector<std::string> labels, std::vector<double> dist);

  std::size_t size() const noexcept { return n_; }
  double dist(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::span<const double> row(std::size_t i) const {
    return {dist_.data() + i * n_, n_};
  }
  double diameter() const noexcept { return diameter_; }

  /// New space restricted to the given points (order preserved).
  FiniteMetricSpace subspace(std::span<const std::size_t> indices) const;

  void require_index(std::size_t i) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> dist_;  // row-major n x n
  std::size_t n_ = 0;
  double diameter_ = 0.0;

  void validate() const;
};

/// Sorted, duplicate-free set of point indices into a FiniteMetricSpace.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<std::size_t> members);
  IndexSet(std::initializer_list<std::size_t> members);

  bool contains(std::size_t i) const;
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<std::size_t>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<std::size_t> members_;
};

/// Euclidean metric space over points in R^d. All points must share one
/// dimension; labels are printed coordinates.
SpacePtr build_grid_space(const std::vector<std::vector<double>>& coords);

/// Convenience for 1-d grids.
SpacePtr build_line_space(const std::vector<double>& coords);

SpacePtr make_space(std::vector<std::string> labels, std::vector<double> dist);

/// The epsilon-enlargement A^eps of a set of points. `open_ball` selects the
/// strict convention {j : exists i in A, d(i,j) < eps}; otherwise d <= eps.
IndexSet enlarge(const FiniteMetricSpace& space, const IndexSet& a,
                 double epsilon, bool open_ball);

double diameter(const FiniteMetricSpace& space);

}  // namespace robayes
