#include "robayes/harness/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "robayes/harness/runners.hpp"
#include "robayes/prob_metrics.hpp"

namespace robayes::harness {

namespace {

ExperimentConfig load_config(const std::string& path,
                             const std::string& out_override,
                             std::optional<std::uint64_t> seed_override,
                             std::optional<int> threads_override) {
  ExperimentConfig cfg = ExperimentConfig::from_file(path);
  if (!out_override.empty()) cfg.output = out_override;
  if (seed_override) cfg.seed = *seed_override;
  if (threads_override) cfg.threads = *threads_override;
  return cfg;
}

int do_run(const std::string& path, const std::string& out,
           std::optional<std::uint64_t> seed, std::optional<int> threads) {
  const ExperimentConfig cfg = load_config(path, out, seed, threads);
  validate_experiment(cfg);
  const Report rep = run_experiment(cfg);
  rep.write(cfg.output);
  nlohmann::ordered_json brief;
  brief["kind"] = to_string(cfg.kind);
  brief["output"] = cfg.output;
  brief["summary"] = rep.summary;
  std::cout << brief.dump(2) << '\n';
  return 0;
}

int do_validate(const std::string& path, const std::string& out,
                std::optional<std::uint64_t> seed,
                std::optional<int> threads) {
  const ExperimentConfig cfg = load_config(path, out, seed, threads);
  std::cout << validate_experiment(cfg).dump(2) << '\n';
  return 0;
}

int do_oracle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measures file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  SpacePtr space;
  try {
    space = build_grid_space(
        j.at("space").at("coords").get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measures file needs space.coords: ") +
                      e.what());
  }
  if (!j.contains("mu") || !j.contains("nu"))
    throw ConfigError("measures file needs weight arrays 'mu' and 'nu'");
  const DiscreteMeasure mu(space, j.at("mu").get<std::vector<double>>());
  const DiscreteMeasure nu(space, j.at("nu").get<std::vector<double>>());

  nlohmann::ordered_json out;
  out["points"] = space->size();
  out["diameter"] = space->diameter();
  out["total_variation"] = total_variation(mu, nu);
  out["hellinger"] = hellinger(mu, nu);
  const double kl_mn = kl_divergence(mu, nu);
  const double kl_nm = kl_divergence(nu, mu);
  out["kl_mu_nu"] = std::isfinite(kl_mn) ? nlohmann::ordered_json(kl_mn)
                                         : nlohmann::ordered_json("inf");
  out["kl_nu_mu"] = std::isfinite(kl_nm) ? nlohmann::ordered_json(kl_nm)
                                         : nlohmann::ordered_json("inf");
  out["prokhorov"] = prokhorov(mu, nu);
  if (mu.support().size() <= 15 && nu.support().size() <= 15)
    out["prokhorov_oracle"] = prokhorov_oracle(mu, nu);
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"probability metrics and prior-perturbation experiments on "
               "posterior laws"};
  app.require_subcommand(1);

  std::string run_path, run_out;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_threads;
  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config,--config", run_path, "experiment config (JSON)")
      ->required();
  run->add_option("--out", run_out, "output directory (overrides config)");
  run->add_option("--seed", run_seed, "seed override");
  run->add_option("--threads", run_threads, "worker threads (0 = hardware)");

  std::string val_path, val_out;
  std::optional<std::uint64_t> val_seed;
  std::optional<int> val_threads;
  CLI::App* val =
      app.add_subcommand("validate", "check a config without running it");
  val->add_option("config,--config", val_path, "experiment config (JSON)")
      ->required();
  val->add_option("--out", val_out, "output directory (overrides config)");
  val->add_option("--seed", val_seed, "seed override");
  val->add_option("--threads", val_threads, "worker threads (0 = hardware)");

  std::string oracle_path;
  CLI::App* orc = app.add_subcommand(
      "oracle", "compute metrics between two measures from a JSON file");
  orc->add_option("measures,--measures", oracle_path,
                  "measures file (space.coords, mu, nu)")
      ->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return do_run(run_path, run_out, run_seed, run_threads);
    if (val->parsed())
      return do_validate(val_path, val_out, val_seed, val_threads);
    if (orc->parsed()) return do_oracle(oracle_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "internal invariant failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace robayes::harness
