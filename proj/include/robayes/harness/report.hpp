#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace robayes::harness {

/// One diagnostic value: (diagnostic name, sample size n, seed group, value).
/// seed_group is "all" for pooled values or the group index as text.
struct CurveRow {
  std::string diagnostic;
  std::size_t n = 0;
  std::string seed_group = "all";
  double value = 0.0;
};

/// Structured run output. Emission order is deterministic; two runs with the
/// same config and seed produce byte-identical files except for the wall-time
/// metadata field.
class Report {
 public:
  nlohmann::ordered_json metadata;
  nlohmann::ordered_json summary;

  void add(const std::string& diagnostic, std::size_t n, double value,
           const std::string& seed_group = "all");

  const std::vector<CurveRow>& curve() const noexcept { return curve_; }

  /// Pooled value of a diagnostic at the given n; throws if absent.
  double value(const std::string& diagnostic, std::size_t n) const;
  /// Per-group values of a diagnostic at the given n (group order).
  std::vector<double> group_values(const std::string& diagnostic,
                                   std::size_t n) const;

  std::string curves_csv() const;
  nlohmann::ordered_json to_json() const;

  /// Writes report.json and curves.csv into the directory (created if needed).
  void write(const std::string& out_dir) const;

 private:
  std::vector<CurveRow> curve_;
};

}  // namespace robayes::harness
