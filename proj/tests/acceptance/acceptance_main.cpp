// Acceptance suite: one check per release criterion, each printing a single
// PASS/FAIL line. Run all (default) or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "robayes/harness/runners.hpp"
#include "robayes/parallel.hpp"
#include "robayes/perturbation.hpp"

using namespace robayes;
using namespace robayes::harness;

namespace {

int g_threads = 0;

SpacePtr random_cloud(RngStream& rng, std::size_t n, std::size_t dim) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
  for (auto& p : pts)
    for (double& c : p) c = 2.0 * rng.next_unit();
  return build_grid_space(pts);
}

DiscreteMeasure random_measure(const SpacePtr& s, RngStream& rng,
                               bool allow_sparse) {
  std::vector<double> w(s->size());
  for (double& x : w) x = -std::log(1.0 - rng.next_unit());
  if (allow_sparse && s->size() >= 2 && rng.next_unit() < 0.4) {
    const std::size_t zeros = rng.next_below(s->size() - 1);
    for (std::size_t k = 0; k < zeros; ++k) w[rng.next_below(s->size())] = 0.0;
    bool any = false;
    for (double x : w) any = any || x > 0.0;
    if (!any) w[0] = 1.0;
  }
  return {s, std::move(w)};
}

ExperimentConfig bernoulli101_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.name = "acceptance";
  cfg.seed = 20260801;
  cfg.experiment_id = static_cast<std::uint64_t>(kind);
  cfg.threads = g_threads;
  cfg.model.type = "bernoulli_grid";
  cfg.model.grid.min = 0.0;
  cfg.model.grid.max = 1.0;
  cfg.model.grid.points = 101;
  cfg.prior.type = "uniform";
  cfg.schedule = {1, 10, 100, 1000, 5000};
  cfg.replicates = 128;
  cfg.seed_groups = 4;
  return cfg;
}

// --- criterion bodies -------------------------------------------------------

bool criterion_1(std::string& detail) {
  RngStream rng(811, 0, 1);
  double max_dev = 0.0;
  for (int round = 0; round < 500; ++round) {
    auto s = random_cloud(rng, 2 + rng.next_below(7), 1 + rng.next_below(2));
    const auto mu = random_measure(s, rng, true);
    const auto nu = random_measure(s, rng, true);
    max_dev = std::max(max_dev,
                       std::fabs(prokhorov(mu, nu) - prokhorov_oracle(mu, nu)));
  }
  std::ostringstream os;
  os << "max |flow - oracle| = " << max_dev << " over 500 pairs";
  detail = os.str();
  return max_dev <= 1e-9;
}

bool criterion_2(std::string& detail) {
  RngStream rng(821, 0, 2);
  std::size_t bad = 0;
  for (int round = 0; round < 500; ++round) {
    auto s = random_cloud(rng, 2 + rng.next_below(11), 1 + rng.next_below(2));
    const std::size_t i = rng.next_below(s->size());
    const std::size_t j = rng.next_below(s->size());
    if (prokhorov(dirac(s, i), dirac(s, j)) != std::min(1.0, s->dist(i, j)))
      ++bad;
  }
  detail = std::to_string(bad) + " of 500 dirac pairs off the closed form";
  return bad == 0;
}

bool criterion_3(std::string& detail) {
  RngStream rng(823, 0, 3);
  std::size_t bad = 0;
  for (int round = 0; round < 1000; ++round) {
    auto s = random_cloud(rng, 2 + rng.next_below(11), 1 + rng.next_below(2));
    const auto mu = random_measure(s, rng, false);
    const auto nu = random_measure(s, rng, false);
    const double tv = total_variation(mu, nu);
    const double he = hellinger(mu, nu);
    if (kl_divergence(mu, nu) < 0.5 * tv * tv - 1e-12) ++bad;
    if (prokhorov(mu, nu) > tv + 1e-12) ++bad;
    if (he * he > tv + 1e-12) ++bad;
    if (tv > std::sqrt(2.0) * he + 1e-12) ++bad;
  }
  detail = std::to_string(bad) + " chain violations over 1000 pairs";
  return bad == 0;
}

bool criterion_4(std::string& detail) {
  RngStream rng(827, 0, 4);
  std::size_t bad = 0;
  for (int round = 0; round < 100; ++round) {
    auto s = random_cloud(rng, 2 + rng.next_below(19), 1 + rng.next_below(2));
    for (int k = 0; k < 3; ++k) {
      const double eps =
          std::max(1e-6, rng.next_unit() * 0.8 * std::max(s->diameter(), 0.1));
      const auto cover = covering_number(*s, eps);
      const auto pack_eps = packing_number(*s, eps);
      const auto pack_2eps = packing_number(*s, 2.0 * eps);
      if (!cover.exact || !pack_eps.exact || !pack_2eps.exact) ++bad;
      if (pack_2eps.count > cover.count) ++bad;
      if (cover.count > pack_eps.count) ++bad;
    }
  }
  detail = std::to_string(bad) + " violations over 100 spaces x 3 radii";
  return bad == 0;
}

bool criterion_5(std::string& detail) {
  ExperimentConfig cfg = bernoulli101_config(ExperimentKind::kConsistency);
  cfg.perturbation.theta_star = std::vector<double>{0.7};
  cfg.diagnostics.neighborhood_radius = 0.05;
  cfg.diagnostics.conv_eps = 0.1;
  const Report rep = run_experiment(cfg);
  const double median = rep.summary.at("final_posterior_mass_U_median");
  const double meta = rep.summary.at("final_meta_prokhorov_to_dirac");
  const double spread = rep.summary.at("final_seed_group_spread");
  std::ostringstream os;
  os << "median pi(U) = " << median << " (>= 0.95), meta = " << meta
     << " (<= 0.1), group spread = " << spread << " (<= 0.03)";
  detail = os.str();
  return median >= 0.95 && meta <= 0.1 && spread <= 0.03;
}

bool criterion_6(std::string& detail) {
  ExperimentConfig cfg = bernoulli101_config(ExperimentKind::kBrittleness);
  cfg.perturbation.alpha = 0.01;
  cfg.perturbation.rho = 0.05;
  cfg.perturbation.theta = std::vector<double>{0.2};
  cfg.perturbation.theta_star = std::vector<double>{0.7};
  cfg.perturbation.eps_bar = 0.45;
  const Report rep = run_experiment(cfg);
  const double gap = rep.summary.at("final_meta_prokhorov_gap");
  const double tv = rep.summary.at("prior_tv_gap");
  std::ostringstream os;
  os << "final gap = " << gap << " (0.5 +- 0.05) with d_tv(prior) = " << tv
     << " (<= 0.01)";
  detail = os.str();
  return gap >= 0.45 && gap <= 0.55 && tv <= 0.01 + 1e-12;
}

bool criterion_7(std::string& detail) {
  ExperimentConfig cfg = bernoulli101_config(ExperimentKind::kCoveringBound);
  cfg.model.grid.points = 21;
  cfg.perturbation.epsilon = 0.1;
  cfg.perturbation.eps_prime = 0.02;
  cfg.schedule = {1, 10, 100, 2000};
  const Report rep = run_experiment(cfg);
  const bool exact = rep.summary.at("covering_exact");
  const double tv = rep.summary.at("prior_tv_evacuated");
  const std::size_t n2 = rep.summary.at("covering_n2eps");
  const double gap = rep.summary.at("final_meta_prokhorov_gap");
  std::ostringstream os;
  os << "d_tv = " << tv << " <= 1/N = " << 1.0 / static_cast<double>(n2)
     << " (exact N = " << n2 << "), final gap = " << gap << " (>= 0.08)";
  detail = os.str();
  return exact && tv <= 1.0 / static_cast<double>(n2) + 1e-12 && gap >= 0.08;
}

bool criterion_8(std::string& detail) {
  // Row-wise Dudley domination across one run of every coupled kind.
  std::size_t rows_checked = 0, violations = 0;
  auto check_rows = [&](const Report& rep) {
    std::map<std::string, double> kf;
    for (const CurveRow& r : rep.curve()) {
      const auto pos = r.diagnostic.rfind("coupled_ky_fan");
      if (pos == std::string::npos) continue;
      kf[r.diagnostic.substr(0, pos) + "|" + std::to_string(r.n) + "|" +
         r.seed_group] = r.value;
    }
    for (const CurveRow& r : rep.curve()) {
      const auto pos = r.diagnostic.rfind("meta_prokhorov_gap");
      if (pos == std::string::npos) continue;
      const auto it = kf.find(r.diagnostic.substr(0, pos) + "|" +
                              std::to_string(r.n) + "|" + r.seed_group);
      if (it == kf.end()) continue;
      ++rows_checked;
      if (r.value > it->second + 1e-9) ++violations;
    }
  };

  ExperimentConfig brittle = bernoulli101_config(ExperimentKind::kBrittleness);
  brittle.model.grid.points = 41;
  brittle.replicates = 24;
  brittle.schedule = {1, 10, 100, 500};
  brittle.perturbation.alpha = 0.01;
  brittle.perturbation.rho = 0.05;
  brittle.perturbation.theta = std::vector<double>{0.2};
  brittle.perturbation.theta_star = std::vector<double>{0.7};
  brittle.perturbation.eps_bar = 0.45;
  check_rows(run_experiment(brittle));

  ExperimentConfig cover = bernoulli101_config(ExperimentKind::kCoveringBound);
  cover.model.grid.points = 21;
  cover.replicates = 24;
  cover.schedule = {1, 10, 100, 500};
  cover.perturbation.epsilon = 0.1;
  check_rows(run_experiment(cover));

  ExperimentConfig miss;
  miss.kind = ExperimentKind::kMisspecificationSlice;
  miss.name = "acceptance";
  miss.seed = 20260801;
  miss.threads = g_threads;
  miss.model.type = "product_bernoulli";
  miss.model.theta1.points = 11;
  miss.model.theta2.min = 0.0;
  miss.model.theta2.max = 0.4;
  miss.model.theta2.points = 5;
  miss.prior.type = "slice_uniform";
  miss.prior.slice_dim = 1;
  miss.prior.slice_value = 0.0;
  miss.perturbation.alpha = 0.01;
  miss.perturbation.theta_star = std::vector<double>{0.6, 0.3};
  miss.perturbation.gap_lower_bound = 0.2;
  miss.schedule = {1, 10, 100, 500};
  miss.replicates = 24;
  miss.seed_groups = 4;
  check_rows(run_experiment(miss));

  detail = std::to_string(violations) + " violations over " +
           std::to_string(rows_checked) + " coupled rows";
  return violations == 0 && rows_checked > 0;
}

bool criterion_9(std::string& detail) {
  ExperimentConfig cfg = bernoulli101_config(ExperimentKind::kBrittleness);
  cfg.model.grid.points = 41;
  cfg.replicates = 16;
  cfg.schedule = {1, 10, 100};
  cfg.perturbation.alpha = 0.01;
  cfg.perturbation.rho = 0.05;
  cfg.perturbation.theta = std::vector<double>{0.2};
  cfg.perturbation.theta_star = std::vector<double>{0.7};
  cfg.perturbation.eps_bar = 0.45;
  cfg.threads = 1;
  const std::string csv1 = run_experiment(cfg).curves_csv();
  cfg.threads = 4;
  const std::string csv4 = run_experiment(cfg).curves_csv();
  detail = csv1 == csv4 ? "curves.csv byte-identical across thread counts"
                        : "curves.csv differs between thread counts";
  return csv1 == csv4;
}

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;  // 0 = none
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  g_threads = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc)
      g_threads = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr,
                   "usage: acceptance [--criterion N] [--threads K]\n");
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "Prokhorov flow solver matches the enumeration oracle", 30.0,
       criterion_1},
      {2, "Dirac pairs hit min(1, d) exactly", 0.0, criterion_2},
      {3, "Pinsker, Prokhorov-TV and Hellinger chains", 0.0, criterion_3},
      {4, "covering/packing inequalities M_2e <= N_e <= M_e", 0.0,
       criterion_4},
      {5, "posterior consistency on the Bernoulli grid", 600.0, criterion_5},
      {6, "brittleness limit 0.5 under a 0.01-TV contamination", 0.0,
       criterion_6},
      {7, "covering bound and evacuation gap", 0.0, criterion_7},
      {8, "row-wise Dudley domination on coupled runs", 0.0, criterion_8},
      {9, "thread-count determinism of curves.csv", 0.0, criterion_9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
      ok = false;
      detail += " [exceeded " + std::to_string(c.time_limit_s) + " s]";
    }
    std::printf("[%s] criterion %d: %s (%s; %.1f s)\n", ok ? "PASS" : "FAIL",
                c.id, c.title, detail.c_str(), secs);
    std::fflush(stdout);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
