#include "solab/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "solab/dynamics.hpp"
#include "solab/errors.hpp"
#include "solab/experiment.hpp"
#include "solab/io.hpp"
#include "solab/metrics.hpp"
#include "solab/self_opt.hpp"
#include "solab/tsp.hpp"
#include "solab/weights.hpp"

namespace solab {

namespace {

namespace fs = std::filesystem;

struct NetworkArgs {
  std::size_t n = 100;
  std::size_t k = 5;
  double p = 0.1;

  ModularSpec spec() const { return {n, k, p, 0}; }
};

struct MetricArgs {
  std::string shift = "continuity";
  std::string appropriateness = "value";
  std::string novelty_rule = "score";
  double convergence_threshold = 0.9;
  double novelty_threshold = 0.5;

  MetricOptions options() const {
    MetricOptions m;
    m.shift = parse_count_shift(shift);
    m.appropriateness = parse_appropriateness(appropriateness);
    m.novelty = parse_novelty_rule(novelty_rule);
    m.convergence_threshold = convergence_threshold;
    m.novelty_threshold = novelty_threshold;
    return m;
  }
};

struct Settings {
  std::uint64_t seed = 1;

  NetworkArgs net;
  MetricArgs metric;

  // gen-weights
  std::string weights_out = "weights_initial.csv";

  // run-so
  double alpha = 5e-7;
  std::size_t steps = 0;
  std::size_t resets = 1000;
  std::string stages = "BL,L,AL";
  std::string weights_in;
  std::string runs_out = "runs.csv";
  std::string weights_dir;

  // sweep
  double alpha_min = 1e-9;
  double alpha_max = 1e-4;
  std::size_t alpha_count = 12;
  std::vector<double> alphas;
  std::size_t seeds = 25;
  std::size_t sweep_resets = 500;
  std::string sweep_out = "sweep";
  std::size_t jobs = 1;
  std::size_t max_cells = 0;

  // effort
  double effort_alpha = 3e-8;
  std::vector<std::size_t> budgets = {1000, 17000};
  std::uint32_t seed_index = 0;
  std::string effort_out = "effort";

  // metrics
  std::string metrics_runs;
  std::string metrics_out = ".";

  // recall-demo
  std::size_t patterns = 5;
  double corrupt_fraction = 0.1;
  std::size_t trials = 200;

  // tsp-demo
  std::size_t cities = 5;
  std::string preset = "random";
  std::size_t restarts = 100;
  double distance_weight = 0.0;

  // export
  std::string export_in;
  std::string artifact;
  std::string export_out;
  std::size_t alpha_index = 0;
  std::size_t export_seed = 0;
};

std::string toml_value(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}
std::string toml_value(double v) { return format_real(v); }
template <class T>
  requires std::is_integral_v<T>
std::string toml_value(T v) {
  return std::to_string(v);
}
template <class T>
std::string toml_value(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += toml_value(v[i]);
  }
  return out + "]";
}

struct Field {
  std::string key;
  std::function<std::string()> value;
  std::function<bool()> present;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<Field> fields;
};

class Cli {
 public:
  Cli() : app_("Hopfield self-optimization lab", "so-lab") {
    app_.require_subcommand(1);
    app_.set_config("--config", "", "Read settings from a TOML file (see --write-config)")
        ->type_name("FILE");
    app_.add_option("--write-config", write_config_,
                    "Write the effective settings of the command to FILE, then run it")
        ->type_name("FILE");
    app_.set_help_all_flag("--help-all", "Help for every command");
    app_.footer("Exit status: 0 ok, 1 configuration error, 2 runtime failure.\n"
                "SO_LAB_MASTER_SEED supplies --seed when neither the command line\n"
                "nor the config file sets it.");
    build();
  }

  CLI::App& app() { return app_; }
  const Settings& settings() const { return s_; }
  const std::string& write_config_path() const { return write_config_; }

  Command& selected() {
    for (auto& c : commands_) {
      if (c.app->parsed()) return c;
    }
    throw ConfigError("no command given");
  }

  std::string config_text() {
    Command& c = selected();
    std::string out = "[" + c.app->get_name() + "]\n";
    for (const auto& f : c.fields) {
      if (f.present && !f.present()) continue;
      out += f.key + " = " + f.value() + "\n";
    }
    return out;
  }

 private:
  template <class T>
  CLI::Option* opt(Command& c, const std::string& name, T& var, const std::string& desc) {
    auto* o = c.app->add_option("--" + name, var, desc)->capture_default_str();
    c.fields.push_back({name, [&var] { return toml_value(var); }, {}});
    return o;
  }

  CLI::Option* text(Command& c, const std::string& name, std::string& var, const std::string& desc) {
    auto* o = c.app->add_option("--" + name, var, desc)->capture_default_str();
    c.fields.push_back(
        {name, [&var] { return toml_value(var); }, [&var] { return !var.empty(); }});
    return o;
  }

  Command& command(const std::string& name, const std::string& desc) {
    commands_.push_back({app_.add_subcommand(name, desc), {}});
    commands_.back().app->configurable()->fallthrough();
    return commands_.back();
  }

  void network(Command& c) {
    opt(c, "n", s_.net.n, "Number of nodes N");
    opt(c, "k", s_.net.k, "Module size k (must divide N)");
    opt(c, "p", s_.net.p, "Inter-module weight magnitude, 0 < p < 1");
  }

  void seed(Command& c, const std::string& desc) {
    opt(c, "seed", s_.seed, desc)->envname("SO_LAB_MASTER_SEED");
  }

  void metric(Command& c) {
    text(c, "shift", s_.metric.shift, "Energy-to-count shift: continuity | variance | sigma")
        ->check(CLI::IsMember({"continuity", "variance", "sigma"}));
    text(c, "appropriateness", s_.metric.appropriateness,
         "Score multiplied by convergence: value | novelty")
        ->check(CLI::IsMember({"value", "novelty"}));
    text(c, "novelty-rule", s_.metric.novelty_rule,
         "Regime novelty test: score | fingerprint | energy_band")
        ->check(CLI::IsMember({"score", "fingerprint", "energy_band"}));
    opt(c, "convergence-threshold", s_.metric.convergence_threshold,
        "Convergence needed for an appropriate outcome");
    opt(c, "novelty-threshold", s_.metric.novelty_threshold,
        "Mean novelty needed for a novel outcome (score rule)");
  }

  void build() {
    {
      auto& c = command("gen-weights", "Write a random modular weight matrix as CSV");
      network(c);
      seed(c, "Master seed (the matrix is drawn from a stream derived from it)");
      text(c, "out", s_.weights_out, "Output CSV file");
    }
    {
      auto& c = command("run-so", "One self-optimization run: BL, L and AL resets");
      network(c);
      opt(c, "alpha", s_.alpha, "Learning rate");
      opt(c, "steps", s_.steps, "Updates per reset T (0: 10 N)");
      opt(c, "resets", s_.resets, "Resets per stage R");
      seed(c, "Master seed");
      text(c, "stages", s_.stages, "Comma-separated stages to run, in order");
      text(c, "weights", s_.weights_in, "Initial weights CSV (default: generated from --seed)");
      text(c, "out", s_.runs_out, "Per-reset records (runs.csv format)");
      text(c, "weights-dir", s_.weights_dir,
           "Also write weights_initial.csv and weights_learned.csv here (default: none)");
      metric(c);
    }
    {
      auto& c = command("sweep", "Learning-rate x seed sweep with creativity scores");
      network(c);
      opt(c, "alpha-min", s_.alpha_min, "Smallest learning rate of the log grid");
      opt(c, "alpha-max", s_.alpha_max, "Largest learning rate of the log grid");
      opt(c, "alpha-count", s_.alpha_count, "Points of the log grid");
      opt(c, "alphas", s_.alphas, "Explicit learning rates (replace the log grid)");
      c.fields.back().present = [this] { return !s_.alphas.empty(); };
      opt(c, "seeds", s_.seeds, "Seeds per learning rate N_s");
      opt(c, "resets", s_.sweep_resets, "Resets per stage N_r");
      opt(c, "steps", s_.steps, "Updates per reset T (0: 10 N)");
      seed(c, "Master seed");
      text(c, "out", s_.sweep_out, "Output directory (resumed if it holds the same sweep)");
      opt(c, "jobs", s_.jobs, "Worker threads");
      opt(c, "max-cells", s_.max_cells, "Stop after this many new cells (0: run to the end)");
      metric(c);
    }
    {
      auto& c = command("effort", "Same-seed SO runs at increasing reset budgets");
      network(c);
      opt(c, "alpha", s_.effort_alpha, "Learning rate");
      opt(c, "resets", s_.budgets, "Reset budgets per stage");
      opt(c, "steps", s_.steps, "Updates per reset T (0: 10 N)");
      seed(c, "Master seed");
      opt(c, "seed-index", s_.seed_index, "Seed index within the master seed");
      text(c, "out", s_.effort_out, "Output directory");
      metric(c);
    }
    {
      auto& c = command("metrics", "Baseline fit and creativity scores from a runs.csv");
      text(c, "runs", s_.metrics_runs, "Input runs.csv")->required();
      text(c, "out", s_.metrics_out, "Directory for scores.csv and baseline.json");
      metric(c);
    }
    {
      auto& c = command("recall-demo", "Hebbian pattern storage and recall from corrupted probes");
      opt(c, "n", s_.net.n, "Number of nodes N");
      opt(c, "patterns", s_.patterns, "Stored patterns M");
      opt(c, "corrupt", s_.corrupt_fraction, "Fraction of flipped nodes per probe");
      opt(c, "trials", s_.trials, "Probes");
      opt(c, "steps", s_.steps, "Updates per probe (0: 10 N)");
      seed(c, "Master seed");
    }
    {
      auto& c = command("tsp-demo", "Tour encoding on a Hopfield network");
      opt(c, "cities", s_.cities, "Number of cities n");
      text(c, "preset", s_.preset, "random | four-city (fixed example layout)")
          ->check(CLI::IsMember({"random", "four-city"}));
      opt(c, "restarts", s_.restarts, "Random restarts");
      opt(c, "steps", s_.steps, "Updates per restart (0: 20 n^2)");
      opt(c, "distance-weight", s_.distance_weight,
          "Tour-length coefficient D (0: largest D keeping every valid tour stable)");
      seed(c, "Master seed");
    }
    {
      auto& c = command("export", "Write figure data from a finished sweep directory");
      text(c, "in", s_.export_in, "Sweep directory")->required();
      text(c, "artifact", s_.artifact,
           "energy_scatter | distributions | scores_curve | pareto | weights_heatmap")
          ->required()
          ->check(CLI::IsMember(
              {"energy_scatter", "distributions", "scores_curve", "pareto", "weights_heatmap"}));
      text(c, "out", s_.export_out, "Output directory (default: <in>/export)");
      opt(c, "alpha-index", s_.alpha_index, "Learning-rate index for per-run artifacts");
      opt(c, "seed-index", s_.export_seed, "Seed index for per-run artifacts");
    }
  }

  CLI::App app_;
  Settings s_;
  std::string write_config_;
  std::vector<Command> commands_;
};

// ---- commands ----

class Progress {
 public:
  Progress(std::ostream& err, std::string label) : err_(err), label_(std::move(label)) {}
  void operator()(std::size_t done, std::size_t total) {
    const std::size_t step = std::max<std::size_t>(1, total / 20);
    if (done == total || done % step == 0) {
      err_ << label_ << ": " << done << "/" << total << "\n";
    }
  }

 private:
  std::ostream& err_;
  std::string label_;
};

std::vector<Stage> parse_stages(const std::string& text) {
  std::vector<Stage> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_stage(item));
  return out;
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

void print_scores_table(std::ostream& out, const BaselineFit& fit,
                        const std::array<double, 3>& self, const std::vector<CreativityScores>& scores) {
  out << "baseline: mu=" << fixed(fit.mu, 3) << " sigma=" << fixed(fit.sigma, 3)
      << " lambda=" << fixed(fit.lambda, 3) << " samples=" << fit.sample_count << "\n";
  out << "baseline below mu-1/2/3 sigma: " << fixed(self[0]) << " " << fixed(self[1]) << " "
      << fixed(self[2]) << "\n";
  out << "alpha        novelty  value   conv    approp  p1      p2      p3      regime\n";
  for (const auto& s : scores) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12.4g %-8.4f %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f ",
                  s.alpha, s.novelty, s.value, s.convergence, s.appropriateness, s.p_1sigma,
                  s.p_2sigma, s.p_3sigma);
    out << buf << regime_label(s.regime) << "\n";
  }
}

int cmd_gen_weights(const Settings& s, std::ostream& out) {
  const auto w = master_weights(s.net.spec(), s.seed);
  write_file_atomic(s.weights_out, matrix_csv(w));
  out << "wrote " << w.size() << "x" << w.size() << " modular weights (k=" << s.net.k
      << ", p=" << s.net.p << ", seed=" << s.seed << ") to " << s.weights_out << "\n";
  return kExitOk;
}

int cmd_run_so(const Settings& s, std::ostream& out) {
  SoConfig cfg;
  cfg.alpha = s.alpha;
  cfg.resets = s.resets;
  cfg.stages = parse_stages(s.stages);
  WeightMatrix w0;
  if (s.weights_in.empty()) {
    w0 = master_weights(s.net.spec(), s.seed);
  } else {
    w0 = parse_matrix_csv(read_file(s.weights_in));
  }
  cfg.steps = s.steps == 0 ? default_steps(w0.size()) : s.steps;
  const SoResult res = run_so(w0, cfg, derive_stage_seeds(s.seed, 0, 0));
  const auto samples = to_samples(res, s.alpha, 0);
  write_file_atomic(s.runs_out, runs_csv(samples));
  if (!s.weights_dir.empty()) {
    write_file_atomic(fs::path(s.weights_dir) / "weights_initial.csv", matrix_csv(w0));
    write_file_atomic(fs::path(s.weights_dir) / "weights_learned.csv", matrix_csv(res.learned));
  }
  out << "N=" << w0.size() << " alpha=" << s.alpha << " T=" << cfg.steps << " R=" << cfg.resets
      << " seed=" << s.seed << "\n";
  out << "wrote " << samples.size() << " records to " << s.runs_out << "\n";
  const bool scored = std::count(cfg.stages.begin(), cfg.stages.end(), Stage::before_learning) &&
                      std::count(cfg.stages.begin(), cfg.stages.end(), Stage::after_learning);
  if (scored) {
    const auto sc = score_samples(samples, s.metric.options());
    print_scores_table(out, sc.baseline, sc.baseline_above_chance, sc.scores);
  }
  return kExitOk;
}

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  SweepPlan plan;
  plan.alphas = s.alphas.empty() ? log_grid(s.alpha_min, s.alpha_max, s.alpha_count) : s.alphas;
  plan.seeds = s.seeds;
  plan.resets = s.sweep_resets;
  plan.steps = s.steps;
  plan.network = s.net.spec();
  plan.master_seed = s.seed;
  plan.out_dir = s.sweep_out;
  plan.jobs = s.jobs;
  plan.metrics = s.metric.options();
  plan.max_new_cells = s.max_cells;
  Progress progress(err, "sweep cells");
  const auto ds = run_sweep(plan, std::ref(progress));
  if (!ds.complete) {
    out << "stopped after " << ds.cells_done << "/" << plan.cell_count()
        << " cells; rerun the same command to resume\n";
    return kExitOk;
  }
  print_scores_table(out, ds.baseline, ds.baseline_above_chance, ds.scores);
  out << "wrote runs.csv, scores.csv, baseline.json, manifest.json to " << plan.out_dir.string()
      << "\n";
  err << "wall time " << fixed(ds.wall_seconds, 1) << " s\n";
  return kExitOk;
}

int cmd_effort(const Settings& s, std::ostream& out) {
  EffortPlan plan;
  plan.network = s.net.spec();
  plan.alpha = s.effort_alpha;
  plan.resets = s.budgets;
  plan.steps = s.steps;
  plan.master_seed = s.seed;
  plan.seed_index = s.seed_index;
  plan.metrics = s.metric.options();
  const auto report = effort_tradeoff(plan);
  const fs::path dir = s.effort_out;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    write_file_atomic(dir / ("runs_R" + std::to_string(report.points[i].resets) + ".csv"),
                      runs_csv(report.samples[i]));
  }
  write_file_atomic(dir / "effort.json", effort_json(report));
  out << "alpha=" << plan.alpha << " seed=" << plan.master_seed << "/" << plan.seed_index << "\n";
  for (const auto& p : report.points) {
    out << "R=" << p.resets << " mu_BL=" << fixed(p.baseline.mu, 3)
        << " mean_AL=" << fixed(p.scores.mean_energy, 3) << " c=" << fixed(p.scores.convergence)
        << " -> " << (p.converged_below_mean ? "converged below mu_BL" : "not converged") << "\n";
  }
  out << "wrote effort.json to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_metrics(const Settings& s, std::ostream& out) {
  const auto samples = parse_runs_csv(read_csv(s.metrics_runs));
  const auto sc = score_samples(samples, s.metric.options());
  const fs::path dir = s.metrics_out;
  write_file_atomic(dir / "scores.csv", scores_csv(sc.scores));
  write_file_atomic(dir / "baseline.json", baseline_json(sc.baseline));
  print_scores_table(out, sc.baseline, sc.baseline_above_chance, sc.scores);
  return kExitOk;
}

int cmd_recall(const Settings& s, std::ostream& out) {
  RecallConfig cfg;
  cfg.n = s.net.n;
  cfg.patterns = s.patterns;
  cfg.corruption = s.corrupt_fraction;
  cfg.trials = s.trials;
  cfg.steps = s.steps;
  cfg.seed = derive_seed(s.seed, kSharedAlpha, 0, 0);
  const auto report = recall_experiment(cfg);
  out << "N=" << cfg.n << " M=" << cfg.patterns << " (capacity 0.14N = "
      << fixed(hebbian_capacity(cfg.n), 1) << ") corruption=" << cfg.corruption << "\n";
  out << "exact recall " << report.exact << "/" << report.trials << " = " << fixed(report.rate())
      << "\n";
  return kExitOk;
}

std::string tour_letters(const Tour& tour) {
  std::string out;
  for (std::size_t i = 0; i < tour.size(); ++i) {
    if (i) out += " -> ";
    out += tour[i] < 26 ? std::string(1, static_cast<char>('A' + tour[i])) : std::to_string(tour[i]);
  }
  return out;
}

int cmd_tsp(const Settings& s, std::ostream& out) {
  if (s.preset == "four-city") {
    if (s.cities != 4 && s.cities != 5) {
      throw ConfigError("the four-city preset has four cities; use --cities 4");
    }
    const auto decoded = decode_tour(four_city_example_state(), 4);
    out << "state (rows = cities A-D, columns = positions 1-4):\n";
    const auto bits = four_city_example_state().to_binary();
    for (std::size_t x = 0; x < 4; ++x) {
      out << "  " << static_cast<char>('A' + x) << ":";
      for (std::size_t i = 0; i < 4; ++i) out << ' ' << bits[tsp_node(4, x, i)];
      out << "\n";
    }
    if (!decoded.valid()) throw std::runtime_error("example state did not decode: " + decoded.describe());
    out << "tour: " << tour_letters(*decoded.tour) << " (valid)\n";
    return kExitOk;
  }
  RngStream rng = derive_stream(s.seed, kSharedAlpha, 0, 0);
  TspInstance inst = random_euclidean_instance(s.cities, rng);
  inst.coefficients.d = s.distance_weight > 0.0 ? s.distance_weight : stable_distance_coefficient(inst);
  const std::size_t steps = s.steps == 0 ? 20 * s.cities * s.cities : s.steps;
  const auto summary = tsp_search(inst, s.restarts, steps, rng);
  out << "n=" << inst.n << " D=" << inst.coefficients.d << " restarts=" << summary.restarts
      << " valid=" << summary.valid << "\n";
  if (summary.best) {
    out << "best tour: " << tour_letters(*summary.best) << " length " << fixed(summary.best_length)
        << "\n";
  } else {
    out << "no valid tour found\n";
  }
  if (inst.n <= 10) {
    const auto opt = brute_force_tour(inst);
    out << "optimal tour: " << tour_letters(opt) << " length " << fixed(tour_length(opt, inst))
        << "\n";
  }
  return kExitOk;
}

int cmd_export(const Settings& s, std::ostream& out) {
  const fs::path in = s.export_in;
  const fs::path dir = s.export_out.empty() ? in / "export" : fs::path(s.export_out);
  const auto artifact = parse_artifact(s.artifact);
  const auto ds = load_sweep(in);
  ExportOptions opt;
  opt.alpha_index = s.alpha_index;
  opt.seed_index = s.export_seed;
  for (const auto& f : export_artifact(ds, artifact, dir, opt)) out << "wrote " << f.string() << "\n";
  return kExitOk;
}

int dispatch(const std::string& name, const Settings& s, std::ostream& out, std::ostream& err) {
  if (name == "gen-weights") return cmd_gen_weights(s, out);
  if (name == "run-so") return cmd_run_so(s, out);
  if (name == "sweep") return cmd_sweep(s, out, err);
  if (name == "effort") return cmd_effort(s, out);
  if (name == "metrics") return cmd_metrics(s, out);
  if (name == "recall-demo") return cmd_recall(s, out);
  if (name == "tsp-demo") return cmd_tsp(s, out);
  if (name == "export") return cmd_export(s, out);
  throw ConfigError("unknown command " + name);
}

void parse(Cli& cli, const std::vector<std::string>& args) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  cli.app().parse(reversed);
}

}  // namespace

std::string effective_config(const std::vector<std::string>& args) {
  Cli cli;
  parse(cli, args);
  return cli.config_text();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli;
  try {
    parse(cli, args);
  } catch (const CLI::ParseError& e) {
    const int code = cli.app().exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (!cli.write_config_path().empty()) write_file_atomic(cli.write_config_path(), cli.config_text());
    return dispatch(cli.selected().app->get_name(), cli.settings(), out, err);
  } catch (const std::invalid_argument& e) {  // ConfigError, ContractError
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace solab
