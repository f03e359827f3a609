#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "solab/cli.hpp"
#include "solab/dynamics.hpp"
#include "solab/errors.hpp"
#include "solab/experiment.hpp"
#include "solab/metrics.hpp"
#include "solab/self_opt.hpp"
#include "solab/tsp.hpp"
#include "solab/weights.hpp"

namespace py = pybind11;
using namespace solab;

namespace {

py::array_t<double> to_array(const WeightMatrix& w) {
  const auto n = static_cast<py::ssize_t>(w.size());
  py::array_t<double> out({n, n});
  std::copy(w.data().begin(), w.data().end(), out.mutable_data());
  return out;
}

WeightMatrix from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ContractError("weights must be a square matrix");
  const auto n = static_cast<std::size_t>(a.shape(0));
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = a.at(i, j);
  return WeightMatrix::from_rows(rows);
}

py::dict baseline_dict(const BaselineFit& f) {
  py::dict d;
  d["mu_BL"] = f.mu;
  d["sigma_BL"] = f.sigma;
  d["lambda"] = f.lambda;
  d["sample_count"] = f.sample_count;
  d["min"] = f.min;
  d["max"] = f.max;
  return d;
}

BaselineFit baseline_from(double mu, double sigma) {
  return {mu, sigma, sigma * sigma, 0, mu, mu};
}

MetricOptions options_from(const std::string& shift, const std::string& novelty_rule) {
  MetricOptions o;
  o.shift = parse_count_shift(shift);
  o.novelty = parse_novelty_rule(novelty_rule);
  return o;
}

py::dict scores_dict(const std::vector<CreativityScores>& scores) {
  std::vector<double> alpha, n, v, c, a, p1, p2, p3, mean;
  std::vector<std::string> regime;
  for (const auto& s : scores) {
    alpha.push_back(s.alpha);
    n.push_back(s.novelty);
    v.push_back(s.value);
    c.push_back(s.convergence);
    a.push_back(s.appropriateness);
    p1.push_back(s.p_1sigma);
    p2.push_back(s.p_2sigma);
    p3.push_back(s.p_3sigma);
    mean.push_back(s.mean_energy);
    regime.emplace_back(regime_label(s.regime));
  }
  py::dict d;
  d["alpha"] = py::array(py::cast(alpha));
  d["novelty"] = py::array(py::cast(n));
  d["value"] = py::array(py::cast(v));
  d["convergence"] = py::array(py::cast(c));
  d["appropriateness"] = py::array(py::cast(a));
  d["p_1sigma"] = py::array(py::cast(p1));
  d["p_2sigma"] = py::array(py::cast(p2));
  d["p_3sigma"] = py::array(py::cast(p3));
  d["mean_energy"] = py::array(py::cast(mean));
  d["regime"] = regime;
  return d;
}

py::dict run_so_py(const py::array_t<double>& weights, double alpha, std::size_t steps,
                   std::size_t resets, std::uint64_t master_seed, std::uint32_t seed_index,
                   const std::vector<std::string>& stages) {
  const WeightMatrix w0 = from_array(weights);
  SoConfig cfg;
  cfg.alpha = alpha;
  cfg.steps = steps == 0 ? default_steps(w0.size()) : steps;
  cfg.resets = resets;
  cfg.stages.clear();
  for (const auto& s : stages) cfg.stages.push_back(parse_stage(s));
  SoResult res;
  {
    py::gil_scoped_release release;
    res = run_so(w0, cfg, derive_stage_seeds(master_seed, 0, seed_index));
  }
  std::vector<std::string> stage;
  std::vector<std::size_t> reset;
  std::vector<double> energy;
  std::vector<bool> fixed;
  for (const auto& r : res.records) {
    stage.emplace_back(stage_label(r.stage));
    reset.push_back(r.reset);
    energy.push_back(r.energy);
    fixed.push_back(r.fixed_point);
  }
  py::dict d;
  d["stage"] = stage;
  d["reset"] = py::array(py::cast(reset));
  d["energy"] = py::array(py::cast(energy));
  d["fixed_point"] = py::array(py::cast(fixed));
  d["learned"] = to_array(res.learned);
  return d;
}

py::dict sweep_py(const std::vector<double>& alphas, std::size_t seeds, std::size_t resets,
                  std::size_t steps, std::size_t n, std::size_t k, double p,
                  std::uint64_t master_seed, const std::string& out_dir, std::size_t jobs) {
  SweepPlan plan;
  plan.alphas = alphas;
  plan.seeds = seeds;
  plan.resets = resets;
  plan.steps = steps;
  plan.network = {n, k, p, 0};
  plan.master_seed = master_seed;
  plan.out_dir = out_dir;
  plan.jobs = jobs;
  SweepDataset ds;
  {
    py::gil_scoped_release release;
    ds = run_sweep(plan);
  }
  py::dict d;
  d["baseline"] = baseline_dict(ds.baseline);
  d["baseline_above_chance"] = std::vector<double>(ds.baseline_above_chance.begin(),
                                                   ds.baseline_above_chance.end());
  d["scores"] = scores_dict(ds.scores);
  d["complete"] = ds.complete;
  return d;
}

}  // namespace

PYBIND11_MODULE(_so_lab, m) {
  m.doc() = "Hopfield self-optimization lab";
  m.attr("__version__") = std::string(code_version());

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "modular_weights",
      [](std::size_t n, std::size_t k, double p, std::uint64_t master_seed) {
        return to_array(master_weights({n, k, p, 0}, master_seed));
      },
      py::arg("n") = 100, py::arg("k") = 5, py::arg("p") = 0.1, py::arg("master_seed") = 1,
      "Modular couplings drawn from the master seed's weight stream (same as gen-weights).");

  m.def(
      "energy",
      [](const std::vector<int>& state, const py::array_t<double>& weights) {
        return energy(StateVector::from_values(state), from_array(weights));
      },
      py::arg("state"), py::arg("weights"));

  m.def("run_so", &run_so_py, py::arg("weights"), py::arg("alpha"), py::arg("steps") = 0,
        py::arg("resets") = 1000, py::arg("master_seed") = 1, py::arg("seed_index") = 0,
        py::arg("stages") = std::vector<std::string>{"BL", "L", "AL"},
        "One SO run; steps=0 means 10 N. Energies are under the initial weights.");

  m.def("sweep", &sweep_py, py::arg("alphas"), py::arg("seeds") = 25, py::arg("resets") = 500,
        py::arg("steps") = 0, py::arg("n") = 100, py::arg("k") = 5, py::arg("p") = 0.1,
        py::arg("master_seed") = 1, py::arg("out_dir") = "", py::arg("jobs") = 1,
        "Learning-rate sweep; with out_dir the usual files are written there.");

  m.def(
      "fit_baseline",
      [](const std::vector<double>& e) { return baseline_dict(fit_baseline(e)); },
      py::arg("energies"));

  m.def(
      "novelty",
      [](double e, double mu, double sigma, const std::string& shift) {
        return novelty_of_energy(e, baseline_from(mu, sigma), options_from(shift, "score"));
      },
      py::arg("energy"), py::arg("mu"), py::arg("sigma"), py::arg("shift") = "continuity");

  m.def(
      "value",
      [](double e, double mu, double sigma, const std::string& shift) {
        return value_of_energy(e, baseline_from(mu, sigma), options_from(shift, "score"));
      },
      py::arg("energy"), py::arg("mu"), py::arg("sigma"), py::arg("shift") = "continuity");

  m.def(
      "recall_rate",
      [](std::size_t n, std::size_t patterns, double corruption, std::size_t trials,
         std::uint64_t seed) {
        return recall_experiment({n, patterns, corruption, trials, 0, seed}).rate();
      },
      py::arg("n") = 100, py::arg("patterns") = 5, py::arg("corruption") = 0.1,
      py::arg("trials") = 200, py::arg("seed") = 0);

  m.def("four_city_tour", [] { return *decode_tour(four_city_example_state(), 4).tour; },
        "City indices of the four-city example state (B D A C).");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs so-lab in-process; returns (exit code, stdout, stderr).");
}
