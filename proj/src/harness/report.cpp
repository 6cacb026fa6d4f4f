#include "robayes/harness/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "robayes/errors.hpp"

namespace robayes::harness {

namespace {
// Shortest round-trip decimal form, same as the JSON emitter uses.
std::string format_value(double v) { return nlohmann::json(v).dump(); }
}  // namespace

void Report::add(const std::string& diagnostic, std::size_t n, double value,
                 const std::string& seed_group) {
  curve_.push_back({diagnostic, n, seed_group, value});
}

double Report::value(const std::string& diagnostic, std::size_t n) const {
  for (const CurveRow& r : curve_)
    if (r.diagnostic == diagnostic && r.n == n && r.seed_group == "all")
      return r.value;
  throw InvariantError("report has no pooled value for " + diagnostic +
                       " at n=" + std::to_string(n));
}

std::vector<double> Report::group_values(const std::string& diagnostic,
                                         std::size_t n) const {
  std::vector<double> out;
  for (const CurveRow& r : curve_)
    if (r.diagnostic == diagnostic && r.n == n && r.seed_group != "all")
      out.push_back(r.value);
  return out;
}

std::string Report::curves_csv() const {
  std::string out = "n,diagnostic,value,seed_group\n";
  for (const CurveRow& r : curve_) {
    out += std::to_string(r.n);
    out += ',';
    out += r.diagnostic;
    out += ',';
    out += format_value(r.value);
    out += ',';
    out += r.seed_group;
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["metadata"] = metadata;

  // Group curve rows by n, pooled values flat and group values as arrays.
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::vector<std::size_t> seen;
  for (const CurveRow& r : curve_) {
    if (std::find(seen.begin(), seen.end(), r.n) != seen.end()) continue;
    seen.push_back(r.n);
    nlohmann::ordered_json row;
    row["n"] = r.n;
    nlohmann::ordered_json pooled;
    nlohmann::ordered_json by_group;
    for (const CurveRow& s : curve_) {
      if (s.n != r.n) continue;
      if (s.seed_group == "all")
        pooled[s.diagnostic] = s.value;
      else
        by_group[s.diagnostic].push_back(s.value);
    }
    row["pooled"] = pooled;
    if (!by_group.empty()) row["by_group"] = by_group;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["summary"] = summary;
  return j;
}

void Report::write(const std::string& out_dir) const {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/report.json");
    if (!f) throw ConfigError("cannot write report to " + out_dir);
    f << to_json().dump(2) << '\n';
  }
  {
    std::ofstream f(out_dir + "/curves.csv");
    if (!f) throw ConfigError("cannot write curves to " + out_dir);
    f << curves_csv();
  }
}

}  // namespace robayes::harness
