#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "robayes/harness/cli.hpp"
#include "robayes/harness/runners.hpp"

using namespace robayes;
using namespace robayes::harness;
using nlohmann::json;

namespace {

ExperimentConfig small_brittleness(int threads = 1) {
  json j = {
      {"kind", "brittleness"},
      {"name", "unit-brittle"},
      {"seed", 2026},
      {"threads", threads},
      {"model",
       {{"type", "bernoulli_grid"},
        {"grid", {{"min", 0.0}, {"max", 1.0}, {"points", 21}}}}},
      {"prior", {{"type", "uniform"}}},
      {"perturbation",
       {{"alpha", 0.01},
        {"rho", 0.05},
        {"theta", 0.2},
        {"theta_star", 0.7},
        {"eps_bar", 0.4}}},
      {"schedule", {1, 10, 100}},
      {"replicates", 12},
      {"seed_groups", 4},
  };
  return ExperimentConfig::from_json(j);
}

json strip_timing(nlohmann::ordered_json j) {
  if (j.contains("metadata") && j["metadata"].contains("timing"))
    j["metadata"].erase("timing");
  return j;
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto p = std::filesystem::temp_directory_path() / ("robayes_test_" + tag);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing and structural validation") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "nope"}}),
                  ConfigError);
  json base = {{"kind", "consistency"},
               {"model", {{"type", "bernoulli_grid"},
                          {"grid", {{"min", 0.0}, {"max", 1.0}, {"points", 5}}}}},
               {"prior", {{"type", "uniform"}}},
               {"perturbation", {{"theta_star", 0.5}}},
               {"schedule", {10, 5}},
               {"replicates", 4}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(base), ConfigError);
  base["schedule"] = {5, 10};
  CHECK_NOTHROW(ExperimentConfig::from_json(base));
  base["replicates"] = 0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(base), ConfigError);
  base["replicates"] = 2;
  base["seed_groups"] = 3;
  CHECK_THROWS_AS(ExperimentConfig::from_json(base), ConfigError);
}

TEST_CASE("grid spec resolution") {
  GridSpec g;
  g.min = 0.0;
  g.max = 1.0;
  g.points = 101;
  const auto coords = g.resolve();
  CHECK(coords.size() == 101);
  CHECK(coords.front() == 0.0);
  CHECK(coords.back() == 1.0);
  GridSpec explicit_grid;
  explicit_grid.coords = {0.0, 0.25};
  CHECK(explicit_grid.resolve() == std::vector<double>{0.0, 0.25});
  GridSpec bad;
  CHECK_THROWS_AS(bad.resolve(), ConfigError);
}

TEST_CASE("validate_experiment reports preconditions") {
  ExperimentConfig cfg = small_brittleness();
  CHECK_NOTHROW(validate_experiment(cfg));
  // the proof restriction alpha < min(delta, rho)
  cfg.perturbation.alpha = 0.2;
  CHECK_THROWS_AS(validate_experiment(cfg), PreconditionError);

  // a prior with no KL support at theta_star refuses a consistency run
  json j = {{"kind", "consistency"},
            {"name", "no-support"},
            {"model", {{"type", "bernoulli_grid"},
                       {"grid", {{"min", 0.0}, {"max", 1.0}, {"points", 11}}}}},
            {"prior", {{"type", "dirac"}, {"value", 0.0}}},
            {"perturbation", {{"theta_star", 0.7}}},
            {"schedule", {5}},
            {"replicates", 2},
            {"seed_groups", 1}};
  CHECK_THROWS_AS(validate_experiment(ExperimentConfig::from_json(j)),
                  PreconditionError);
}

TEST_CASE("brittleness run invariants") {
  const ExperimentConfig cfg = small_brittleness();
  const Report rep = run_experiment(cfg);
  CHECK(rep.summary.at("prior_tv_gap").get<double>() <= 0.01 + 1e-12);
  CHECK(rep.summary.at("limit_target").get<double>() == 0.5);
  CHECK(rep.summary.at("dudley_violations").get<std::size_t>() == 0);
  for (std::size_t n : cfg.schedule) {
    CHECK(rep.value("meta_prokhorov_gap", n) <=
          rep.value("coupled_ky_fan", n) + 1e-9);
    CHECK(rep.value("meta_prokhorov_gap", n) >= 0.0);
    CHECK(rep.value("meta_prokhorov_gap", n) <= 1.0);
    CHECK(rep.group_values("meta_prokhorov_gap", n).size() == 4);
  }
}

TEST_CASE("report determinism") {
  SUBCASE("same config, same bytes") {
    const ExperimentConfig cfg = small_brittleness();
    const Report a = run_experiment(cfg);
    const Report b = run_experiment(cfg);
    CHECK(a.curves_csv() == b.curves_csv());
    CHECK(strip_timing(a.to_json()) == strip_timing(b.to_json()));
  }
  SUBCASE("thread count does not matter") {
    const Report one = run_experiment(small_brittleness(1));
    const Report two = run_experiment(small_brittleness(2));
    CHECK(one.curves_csv() == two.curves_csv());
  }
  SUBCASE("seed matters") {
    ExperimentConfig cfg = small_brittleness();
    cfg.seed += 1;
    CHECK(run_experiment(cfg).curves_csv() !=
          run_experiment(small_brittleness()).curves_csv());
  }
}

TEST_CASE("covering bound run") {
  json j = {{"kind", "covering_bound"},
            {"name", "unit-cover"},
            {"seed", 7},
            {"model", {{"type", "bernoulli_grid"},
                       {"grid", {{"min", 0.0}, {"max", 1.0}, {"points", 21}}}}},
            {"prior", {{"type", "uniform"}}},
            {"perturbation", {{"epsilon", 0.1}, {"eps_prime", 0.02}}},
            {"schedule", {10, 200}},
            {"replicates", 8},
            {"seed_groups", 2}};
  const Report rep = run_experiment(ExperimentConfig::from_json(j));
  CHECK(rep.summary.at("covering_n2eps").get<std::size_t>() == 3);
  CHECK(rep.summary.at("covering_exact").get<bool>());
  const double tv = rep.summary.at("prior_tv_evacuated").get<double>();
  CHECK(tv == doctest::Approx(2.0 / 21.0).epsilon(1e-12));
  CHECK(tv <= 1.0 / 3.0 + 1e-12);
  CHECK(rep.summary.at("dudley_violations").get<std::size_t>() == 0);
}

TEST_CASE("growing diameter run") {
  json j = {{"kind", "growing_diameter"},
            {"name", "unit-grow"},
            {"seed", 7},
            {"model", {{"type", "gaussian_bins"}, {"sigma", 0.25}, {"bins", 32}}},
            {"prior", {{"type", "uniform"}}},
            {"perturbation", {{"epsilon", 0.25}, {"rho", 0.5}}},
            {"grids",
             {{{"min", 0.0}, {"max", 1.0}, {"points", 11}},
              {{"min", 0.0}, {"max", 2.0}, {"points", 21}}}},
            {"schedule", {20}},
            {"replicates", 6},
            {"seed_groups", 2},
            {"diagnostics", {{"allow_inexact_covering", true}}}};
  const Report rep = run_experiment(ExperimentConfig::from_json(j));
  CHECK(rep.summary.at("bound_non_increasing").get<bool>());
  const auto& per_grid = rep.summary.at("per_grid");
  CHECK(per_grid.size() == 2);
  CHECK(per_grid[0].at("bound").get<double>() >=
        per_grid[1].at("bound").get<double>());

  // grids that are not nested are rejected
  json bad = j;
  bad["grids"] = {{{"min", 0.0}, {"max", 1.0}, {"points", 11}},
                  {{"min", 0.0}, {"max", 2.0}, {"points", 20}}};
  CHECK_THROWS_AS(run_experiment(ExperimentConfig::from_json(bad)),
                  ConfigError);
}

TEST_CASE("misspecification run") {
  json j = {{"kind", "misspecification_slice"},
            {"name", "unit-miss"},
            {"seed", 3},
            {"model",
             {{"type", "product_bernoulli"},
              {"theta1", {{"min", 0.0}, {"max", 1.0}, {"points", 6}}},
              {"theta2", {{"min", 0.0}, {"max", 0.4}, {"points", 3}}},
              {"base2", 0.1},
              {"slope2", 1.0}}},
            {"prior", {{"type", "slice_uniform"}, {"slice_dim", 1},
                       {"slice_value", 0.0}}},
            {"perturbation",
             {{"alpha", 0.02}, {"theta_star", {0.6, 0.4}},
              {"gap_lower_bound", 0.2}}},
            {"schedule", {20, 200}},
            {"replicates", 8},
            {"seed_groups", 2}};
  const Report rep = run_experiment(ExperimentConfig::from_json(j));
  CHECK(rep.summary.at("misspecified").get<bool>());
  CHECK(rep.summary.at("prior_tv_gap").get<double>() <= 0.02 + 1e-12);
  CHECK(rep.summary.at("gap_persistent").get<bool>());
  CHECK(rep.summary.at("dudley_violations").get<std::size_t>() == 0);

  // the well-specified control: theta2* = 0 closes the gap
  json ws = j;
  ws["perturbation"]["theta_star"] = {0.6, 0.0};
  const Report rep0 = run_experiment(ExperimentConfig::from_json(ws));
  CHECK(!rep0.summary.at("misspecified").get<bool>());
  CHECK(rep0.value("meta_prokhorov_gap", 200) <= 0.25);

  // alpha = 0 keeps the priors identical
  json same = j;
  same["perturbation"]["alpha"] = 0.0;
  const Report rep1 = run_experiment(ExperimentConfig::from_json(same));
  for (std::size_t n : {std::size_t{20}, std::size_t{200}})
    CHECK(rep1.value("meta_prokhorov_gap", n) == 0.0);
}

TEST_CASE("metric validation run") {
  json j = {{"kind", "metric_validation"}, {"name", "unit-mv"}, {"seed", 12},
            {"replicates", 0}};
  const Report empty = run_experiment(ExperimentConfig::from_json(j));
  CHECK(empty.summary.at("violations_total").get<std::size_t>() == 0);
  CHECK(empty.summary.at("checks_run").get<std::size_t>() == 0);

  j["replicates"] = 80;
  const Report rep = run_experiment(ExperimentConfig::from_json(j));
  CHECK(rep.summary.at("checks_run").get<std::size_t>() == 80);
  CHECK(rep.summary.at("violations_total").get<std::size_t>() == 0);
  CHECK(rep.summary.at("oracle_max_abs_dev").get<double>() <= 1e-9);
}

TEST_CASE("consistency run diagnostics") {
  json j = {{"kind", "consistency"},
            {"name", "unit-cons"},
            {"seed", 5},
            {"model", {{"type", "bernoulli_grid"},
                       {"grid", {{"min", 0.0}, {"max", 1.0}, {"points", 21}}}}},
            {"prior", {{"type", "uniform"}}},
            {"perturbation", {{"theta_star", 0.7}}},
            {"schedule", {1, 50, 400}},
            {"replicates", 12},
            {"seed_groups", 3}};
  const Report rep = run_experiment(ExperimentConfig::from_json(j));
  CHECK(rep.summary.at("kf_meta_identity_max_gap").get<double>() <= 1e-9);
  CHECK(rep.summary.at("dudley_violations").get<std::size_t>() == 0);
  // the neighborhood mass rises and the convergence fraction falls
  CHECK(rep.value("posterior_mass_U_median", 400) >
        rep.value("posterior_mass_U_median", 1));
  CHECK(rep.value("frac_dpr_gt_eps", 400) <= rep.value("frac_dpr_gt_eps", 1));

  // a dirac prior at theta_star saturates everything immediately
  json fixed = j;
  fixed["prior"] = {{"type", "dirac"}, {"value", 0.7}};
  const Report rep2 = run_experiment(ExperimentConfig::from_json(fixed));
  for (std::size_t n : {std::size_t{1}, std::size_t{50}, std::size_t{400}}) {
    CHECK(rep2.value("posterior_mass_U_median", n) == 1.0);
    CHECK(rep2.value("meta_prokhorov_to_dirac", n) == 0.0);
    CHECK(rep2.value("frac_dpr_gt_eps", n) == 0.0);
  }
}

TEST_CASE("cli") {
  const auto dir = temp_dir("cli");
  const auto cfg_path = dir / "config.json";
  {
    std::ofstream f(cfg_path);
    f << R"({
      "kind": "brittleness", "name": "cli-case", "seed": 2,
      "model": {"type": "bernoulli_grid", "grid": {"min": 0, "max": 1, "points": 11}},
      "prior": {"type": "uniform"},
      "perturbation": {"alpha": 0.01, "rho": 0.05, "theta": 0.2, "theta_star": 0.7, "eps_bar": 0.4},
      "schedule": [1, 20], "replicates": 6, "seed_groups": 2
    })";
  }
  const std::string out = (dir / "out").string();

  SUBCASE("validate then run") {
    const char* argv_v[] = {"robayes", "validate", cfg_path.c_str()};
    CHECK(cli_main(3, argv_v) == 0);
    const char* argv_r[] = {"robayes", "run", cfg_path.c_str(), "--out",
                            out.c_str(), "--threads", "2"};
    CHECK(cli_main(7, argv_r) == 0);
    CHECK(std::filesystem::exists(out + "/report.json"));
    CHECK(std::filesystem::exists(out + "/curves.csv"));
  }
  SUBCASE("config errors exit 1") {
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    const char* argv[] = {"robayes", "validate", bad.c_str()};
    CHECK(cli_main(3, argv) == 1);
    const char* argv2[] = {"robayes", "run", "/nonexistent/x.json"};
    CHECK(cli_main(3, argv2) == 1);
  }
  SUBCASE("precondition violations exit 2") {
    const auto viol = dir / "viol.json";
    {
      std::ifstream in(cfg_path);
      json j;
      in >> j;
      j["perturbation"]["alpha"] = 0.5;  // >= rho
      std::ofstream(viol) << j.dump();
    }
    const char* argv[] = {"robayes", "run", viol.c_str()};
    CHECK(cli_main(3, argv) == 2);
  }
  SUBCASE("oracle subcommand") {
    const auto meas = dir / "measures.json";
    std::ofstream(meas) << R"({
      "space": {"coords": [[0.0], [1.0]]},
      "mu": [0.7, 0.3], "nu": [0.3, 0.7]
    })";
    const char* argv[] = {"robayes", "oracle", meas.c_str()};
    CHECK(cli_main(3, argv) == 0);
  }
}
