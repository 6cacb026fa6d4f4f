#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include <json.hpp>

#include "robayes/harness/runners.hpp"
#include "robayes/perturbation.hpp"

namespace py = pybind11;
using namespace robayes;

namespace {

using MutableSpacePtr = std::shared_ptr<FiniteMetricSpace>;

MutableSpacePtr unconst(const SpacePtr& p) {
  // Spaces are immutable by API; the cast only satisfies the holder type.
  return std::const_pointer_cast<FiniteMetricSpace>(p);
}

std::vector<std::size_t> to_indices(const IndexSet& s) {
  return s.members();
}

std::string run_experiment_json(const std::string& config_json) {
  const auto cfg = harness::ExperimentConfig::from_json(
      nlohmann::json::parse(config_json));
  harness::validate_experiment(cfg);
  return harness::run_experiment(cfg).to_json().dump();
}

std::string validate_config_json(const std::string& config_json) {
  const auto cfg = harness::ExperimentConfig::from_json(
      nlohmann::json::parse(config_json));
  return harness::validate_experiment(cfg).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "probability metrics on discrete measures and prior-perturbation "
            "experiments on posterior laws";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError",
                                            PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError",
                                         PyExc_RuntimeError);

  py::class_<FiniteMetricSpace, MutableSpacePtr>(m, "FiniteMetricSpace")
      .def("__len__", &FiniteMetricSpace::size)
      .def("size", &FiniteMetricSpace::size)
      .def("dist", &FiniteMetricSpace::dist, py::arg("i"), py::arg("j"))
      .def("label",
           [](const FiniteMetricSpace& s, std::size_t i) { return s.label(i); })
      .def("diameter", &FiniteMetricSpace::diameter)
      .def("__repr__", [](const FiniteMetricSpace& s) {
        return "<FiniteMetricSpace of " + std::to_string(s.size()) + " points>";
      });

  m.def("build_grid_space",
        [](const std::vector<std::vector<double>>& coords) {
          return unconst(build_grid_space(coords));
        },
        py::arg("coords"), "Euclidean metric space over points in R^d");
  m.def("build_line_space",
        [](const std::vector<double>& coords) {
          return unconst(build_line_space(coords));
        },
        py::arg("coords"));
  m.def("enlarge",
        [](const MutableSpacePtr& space, const std::vector<std::size_t>& a,
           double epsilon, bool open_ball) {
          return to_indices(enlarge(*space, IndexSet(a), epsilon, open_ball));
        },
        py::arg("space"), py::arg("indices"), py::arg("epsilon"),
        py::arg("open_ball") = true);
  m.def("diameter",
        [](const MutableSpacePtr& space) { return space->diameter(); },
        py::arg("space"));

  py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
      .def(py::init([](const MutableSpacePtr& space, std::vector<double> w) {
             return DiscreteMeasure(space, std::move(w));
           }),
           py::arg("space"), py::arg("weights"))
      .def("weights",
           [](const DiscreteMeasure& mu) {
             return std::vector<double>(mu.weights().begin(),
                                        mu.weights().end());
           })
      .def("weight", &DiscreteMeasure::weight, py::arg("i"))
      .def("mass",
           [](const DiscreteMeasure& mu, const std::vector<std::size_t>& a) {
             return mu.mass(IndexSet(a));
           },
           py::arg("indices"))
      .def("support", &DiscreteMeasure::support)
      .def_property_readonly(
          "space", [](const DiscreteMeasure& mu) { return unconst(mu.space()); })
      .def("__len__", &DiscreteMeasure::size);

  m.def("dirac",
        [](const MutableSpacePtr& space, std::size_t i) {
          return dirac(space, i);
        },
        py::arg("space"), py::arg("i"));
  m.def("total_variation", &total_variation, py::arg("mu"), py::arg("nu"));
  m.def("kl_divergence", &kl_divergence, py::arg("mu"), py::arg("nu"));
  m.def("hellinger", &hellinger, py::arg("mu"), py::arg("nu"));
  m.def("prokhorov", &prokhorov, py::arg("mu"), py::arg("nu"));
  m.def("prokhorov_oracle", &prokhorov_oracle, py::arg("mu"), py::arg("nu"));
  m.def("ky_fan_empirical",
        [](const std::vector<double>& d) {
          return ky_fan_empirical(std::span<const double>(d));
        },
        py::arg("distances"));

  py::class_<EmpiricalLaw>(m, "EmpiricalLaw")
      .def(py::init<std::vector<DiscreteMeasure>>(), py::arg("samples"))
      .def_static("repeated", &EmpiricalLaw::repeated, py::arg("measure"),
                  py::arg("count"))
      .def("__len__", &EmpiricalLaw::size)
      .def("sample", &EmpiricalLaw::sample, py::arg("i"))
      .def("slice", &EmpiricalLaw::slice, py::arg("first"), py::arg("count"));

  m.def("meta_space",
        [](const EmpiricalLaw& a, const EmpiricalLaw& b, int threads) {
          return unconst(meta_space(a, b, threads));
        },
        py::arg("a"), py::arg("b"), py::arg("threads") = 1);
  m.def("meta_prokhorov", &meta_prokhorov, py::arg("a"), py::arg("b"),
        py::arg("threads") = 1);
  m.def("ky_fan_to_dirac", &ky_fan_to_dirac, py::arg("law"), py::arg("target"),
        py::arg("threads") = 1);

  py::class_<CategoricalModel>(m, "CategoricalModel")
      .def(py::init([](const MutableSpacePtr& space, std::size_t outcomes,
                       std::vector<double> rows) {
             return CategoricalModel(space, outcomes, std::move(rows));
           }),
           py::arg("theta_space"), py::arg("outcomes"),
           py::arg("likelihood_rows"))
      .def_property_readonly(
          "theta_space",
          [](const CategoricalModel& mo) { return unconst(mo.theta_space()); })
      .def("grid_size", &CategoricalModel::grid_size)
      .def("outcomes", &CategoricalModel::outcomes)
      .def("likelihood", &CategoricalModel::likelihood, py::arg("theta"),
           py::arg("x"))
      .def("model_kl", &CategoricalModel::model_kl, py::arg("i"), py::arg("j"));

  m.def("make_bernoulli_grid_model", &make_bernoulli_grid_model,
        py::arg("thetas"));
  m.def("make_product_bernoulli_model", &make_product_bernoulli_model,
        py::arg("theta1_grid"), py::arg("theta2_grid"), py::arg("base2") = 0.1,
        py::arg("slope2") = 1.0);
  m.def("make_gaussian_bin_model", &make_gaussian_bin_model, py::arg("grid"),
        py::arg("sigma"), py::arg("bins"), py::arg("x_min"), py::arg("x_max"));

  py::class_<RngSeed>(m, "RngSeed")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed") = 0,
           py::arg("experiment_id") = 0)
      .def_readwrite("seed", &RngSeed::seed)
      .def_readwrite("experiment_id", &RngSeed::experiment_id);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("draws", &Dataset::draws)
      .def("__len__", &Dataset::size);

  m.def("sample_data",
        [](const CategoricalModel& model, std::size_t theta_index,
           std::size_t n, const RngSeed& seed, std::uint64_t replicate) {
          return sample_data(model, theta_index, n, seed, replicate);
        },
        py::arg("model"), py::arg("theta_index"), py::arg("n"), py::arg("seed"),
        py::arg("replicate") = 0);
  m.def("posterior", &posterior, py::arg("prior"), py::arg("model"),
        py::arg("data"));
  m.def("posterior_law", &posterior_law, py::arg("prior"), py::arg("model"),
        py::arg("data_theta"), py::arg("n"), py::arg("replicates"),
        py::arg("seed"), py::arg("threads") = 1);
  m.def("coupled_posterior_distances",
        [](const DiscreteMeasure& p1, const DiscreteMeasure& p2,
           const CategoricalModel& model, std::size_t data_theta, std::size_t n,
           std::size_t replicates, const RngSeed& seed, int threads) {
          const auto s = coupled_posterior_distances(p1, p2, model, data_theta,
                                                     n, replicates, seed,
                                                     threads);
          return std::vector<double>(s.distances().begin(),
                                     s.distances().end());
        },
        py::arg("prior1"), py::arg("prior2"), py::arg("model"),
        py::arg("data_theta"), py::arg("n"), py::arg("replicates"),
        py::arg("seed"), py::arg("threads") = 1);

  m.def("kl_neighborhood",
        [](const CategoricalModel& model, std::size_t theta_star, double eps) {
          return to_indices(kl_neighborhood(model, theta_star, eps).members);
        },
        py::arg("model"), py::arg("theta_star"), py::arg("epsilon"));
  m.def("has_kl_support",
        [](const DiscreteMeasure& prior, const CategoricalModel& model,
           std::size_t theta_star, const std::vector<double>& ladder) {
          if (ladder.empty()) return has_kl_support(prior, model, theta_star);
          return has_kl_support(prior, model, theta_star,
                                std::span<const double>(ladder));
        },
        py::arg("prior"), py::arg("model"), py::arg("theta_star"),
        py::arg("ladder") = std::vector<double>{});
  m.def("dirac_contamination", &dirac_contamination, py::arg("prior"),
        py::arg("theta"), py::arg("alpha"));
  m.def("ball_evacuation", &ball_evacuation, py::arg("prior"),
        py::arg("theta_star"), py::arg("epsilon"));
  m.def("covering_number",
        [](const MutableSpacePtr& space, double eps) {
          const auto c = covering_number(*space, eps);
          return py::make_tuple(c.count, to_indices(c.centers), c.exact);
        },
        py::arg("space"), py::arg("epsilon"),
        "returns (count, centers, exact)");
  m.def("packing_number",
        [](const MutableSpacePtr& space, double eps) {
          const auto c = packing_number(*space, eps);
          return py::make_tuple(c.count, to_indices(c.points), c.exact);
        },
        py::arg("space"), py::arg("epsilon"), "returns (count, points, exact)");
  m.def("least_mass_center",
        [](const DiscreteMeasure& prior, double eps) {
          const auto [idx, mass] = least_mass_center(prior, eps);
          return py::make_tuple(idx, mass);
        },
        py::arg("prior"), py::arg("epsilon"), "returns (theta_star, mass)");

  m.def("run_experiment_json", &run_experiment_json, py::arg("config_json"),
        "run an experiment from a JSON config string; returns the report "
        "JSON");
  m.def("validate_config_json", &validate_config_json, py::arg("config_json"));

  m.attr("__version__") = "0.1.0";
}
