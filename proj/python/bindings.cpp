#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ridgeless/config.hpp"
#include "ridgeless/errors.hpp"
#include "ridgeless/estimator.hpp"
#include "ridgeless/experiment.hpp"
#include "ridgeless/realdata.hpp"
#include "ridgeless/risk.hpp"
#include "ridgeless/simulate.hpp"
#include "ridgeless/spectra.hpp"
#include "ridgeless/table.hpp"
#include "ridgeless/theory.hpp"

namespace py = pybind11;
using namespace ridgeless;

namespace {

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["preset"] = r.preset;
  d["n"] = r.n;
  d["d"] = r.d;
  d["M"] = r.M;
  d["F"] = r.F;
  d["rho2"] = r.rho2;
  d["eps"] = r.eps;
  d["alpha"] = r.alpha;
  d["snr"] = r.snr;
  d["tau"] = r.tau;
  d["rep_count"] = r.rep_count;
  d["stat"] = r.stat;
  d["value"] = r.value;
  d["stderr"] = r.stderr_;
  d["valid_flags"] = r.valid_flags;
  d["seed"] = r.seed;
  d["config_hash"] = r.config_hash;
  return d;
}

py::list table_list(const ResultTable& table) {
  py::list out;
  for (const ResultRow& r : table) out.append(row_dict(r));
  return out;
}

std::string table_csv(const ResultTable& table) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const ResultRow& r : table) os << to_csv_line(r) << '\n';
  return os.str();
}

ExperimentConfig resolve(const py::object& config) {
  if (py::isinstance<ExperimentConfig>(config)) return config.cast<ExperimentConfig>();
  return preset_config(parse_preset(config.cast<std::string>()));
}

}  // namespace

PYBIND11_MODULE(_ridgeless, m) {
  m.doc() = "Distributed ridgeless regression: spectra, simulation, estimators, risk and theory";

  auto base = py::register_exception<Error>(m, "RidgelessError");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<DataError>(m, "DataError", base);
  py::register_exception<NumericError>(m, "NumericError", base);
  py::register_exception<ParameterError>(m, "ParameterError", base);
  py::register_exception<DivisibilityError>(m, "DivisibilityError", base);
  py::register_exception<BoundUndefinedError>(m, "BoundUndefinedError", base);

  py::class_<Spectrum>(m, "Spectrum")
      .def_static("polynomial_decay", &Spectrum::polynomial_decay, py::arg("eps"), py::arg("dim"))
      .def_static("polynomial_decay_infinite", &Spectrum::polynomial_decay_infinite, py::arg("eps"),
                  py::arg("trunc_dim") = kDefaultTruncDim)
      .def_static("strong_weak", &Spectrum::strong_weak, py::arg("num_strong"), py::arg("dim"),
                  py::arg("rho2"), py::arg("rho1") = 1.0)
      .def_static("explicit", &Spectrum::explicit_values, py::arg("values"))
      .def_static("isotropic", &Spectrum::isotropic, py::arg("dim"))
      .def_property_readonly("dim", &Spectrum::dim)
      .def_property_readonly("infinite", &Spectrum::infinite)
      .def_property_readonly("eigenvalues", [](const Spectrum& s) {
        return std::vector<double>(s.eigenvalues().begin(), s.eigenvalues().end());
      })
      .def("trace", &Spectrum::trace)
      .def("weighted_trace", &Spectrum::weighted_trace, py::arg("alpha"))
      .def("r_k", [](const Spectrum& s, std::size_t k) { return s.effective_rank_r(k).r_k; }, py::arg("k"))
      .def("R_k", [](const Spectrum& s, std::size_t k) { return s.effective_rank_R(k).R_k; }, py::arg("k"))
      .def("effective_dimension", &Spectrum::effective_dimension, py::arg("n_local"), py::arg("a") = 2.0)
      .def("__repr__", &Spectrum::describe);

  m.def("divisors", &divisors, py::arg("n"));

  m.def(
      "min_norm_fit",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, std::optional<double> rank_tol) {
        const LocalFit f = min_norm_fit(X, Y, rank_tol);
        return py::make_tuple(f.beta_hat, f.numerical_rank, f.interpolates);
      },
      py::arg("X"), py::arg("Y"), py::arg("rank_tol") = py::none(),
      "Minimum-norm least-squares fit; returns (beta_hat, numerical_rank, interpolates).");

  m.def(
      "fit_distributed",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, std::size_t M) {
        const SplitPlan plan = split(static_cast<std::size_t>(X.rows()), M);
        return fit_distributed(X, Y, plan).beta_bar;
      },
      py::arg("X"), py::arg("Y"), py::arg("M"),
      "Average of the min-norm fits on M equal contiguous row blocks.");

  m.def(
      "conditional_risk",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_star, const Spectrum& spectrum,
         std::size_t M, double tau) {
        const SplitPlan plan = split(static_cast<std::size_t>(X.rows()), M);
        const auto shards = decompose_shards(X, plan);
        return py::make_tuple(conditional_bias(shards, beta_star, spectrum),
                              conditional_variance(shards, spectrum, tau));
      },
      py::arg("X"), py::arg("beta_star"), py::arg("spectrum"), py::arg("M"), py::arg("tau") = 1.0,
      "Exact noise-conditional (bias, variance) of the M-machine average; X is in the eigenbasis.");

  m.def("excess_risk", &excess_risk, py::arg("beta"), py::arg("beta_star"), py::arg("spectrum"));

  py::module_ th = m.def_submodule("theory", "Closed-form bounds and optimal machine counts");
  th.def("argmin_h", [](double C1, double C2) {
    const auto r = theory::argmin_h(C1, C2);
    return py::make_tuple(r.m_opt, r.h_min);
  }, py::arg("C1"), py::arg("C2"));
  th.def("optimal_m_finite", [](double d, double F, double snr, double rho2, double n) {
    return theory::optimal_m_finite(d, F, snr, rho2, n).m;
  }, py::arg("d"), py::arg("F"), py::arg("snr"), py::arg("rho2"), py::arg("n"));
  th.def("optimal_m_poly", [](double alpha, double eps, double n, double tau) {
    return theory::optimal_m_poly(alpha, eps, n, tau).m;
  }, py::arg("alpha"), py::arg("eps"), py::arg("n"), py::arg("tau") = 1.0);
  th.def("universal_lower_bound", &theory::universal_lower_bound, py::arg("d"), py::arg("n"), py::arg("M"),
         py::arg("tau"));
  th.def("round_to_divisor", &theory::round_to_divisor, py::arg("m"), py::arg("n"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("preset", [](const std::string& name) { return preset_config(parse_preset(name)); })
      .def_static("parse", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def_readwrite("n", &ExperimentConfig::n)
      .def_readwrite("tau", &ExperimentConfig::tau)
      .def_readwrite("M_values", &ExperimentConfig::M_values)
      .def_readwrite("reps", &ExperimentConfig::reps)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def("validate", &ExperimentConfig::validate)
      .def("hash", &ExperimentConfig::hash)
      .def("canonical", &ExperimentConfig::canonical);

  m.def("presets", &preset_names);
  m.def("run_sweep", [](const py::object& config) {
    const ExperimentConfig c = resolve(config);
    ResultTable t;
    {
      py::gil_scoped_release release;
      t = run_sweep(c).table;
    }
    return table_list(t);
  }, py::arg("config"), "Monte-Carlo sweep; returns one dict per result row.");
  m.def("run_theory", [](const py::object& config) { return table_list(run_theory(resolve(config))); },
        py::arg("config"));
  m.def("run_realdata", [](const py::object& config, const std::string& path) {
    ExperimentConfig c = resolve(config);
    if (!path.empty()) c.realdata.path = path;
    return table_list(run_realdata(c).table);
  }, py::arg("config"), py::arg("path") = "");
  m.def("sweep_csv", [](const py::object& config) { return table_csv(run_sweep(resolve(config)).table); },
        py::arg("config"), "Same rows as run_sweep, rendered as CSV text.");
  m.attr("CSV_HEADER") = std::string(kCsvHeader);
}
