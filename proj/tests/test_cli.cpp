#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "solab/cli.hpp"
#include "solab/io.hpp"

using namespace solab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("solab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// SO_LAB_UPDATE_SNAPSHOTS=1 rewrites the files instead of comparing.
void check_snapshot(const std::string& name, const std::string& text) {
  const fs::path file = fs::path(SO_LAB_SNAPSHOT_DIR) / (name + ".txt");
  if (std::getenv("SO_LAB_UPDATE_SNAPSHOTS")) {
    write_file_atomic(file, text);
    return;
  }
  REQUIRE_MESSAGE(fs::exists(file), "missing snapshot " << file.string());
  CHECK(read_file(file) == text);
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) ::setenv("SO_LAB_MASTER_SEED", value, 1);
    else ::unsetenv("SO_LAB_MASTER_SEED");
  }
  ~EnvGuard() { ::unsetenv("SO_LAB_MASTER_SEED"); }
};

const std::vector<std::string> kCommands = {"gen-weights", "run-so",      "sweep",    "effort",
                                            "metrics",     "recall-demo", "tsp-demo", "export"};

}  // namespace

TEST_CASE("help output matches the snapshots") {
  EnvGuard env(nullptr);
  auto top = cli({"--help"});
  CHECK(top.code == 0);
  check_snapshot("help", top.out);
  for (const auto& c : kCommands) {
    INFO(c);
    auto r = cli({c, "--help"});
    CHECK(r.code == 0);
    check_snapshot("help_" + c, r.out);
  }
}

TEST_CASE("every option shows a default") {
  for (const auto& c : kCommands) {
    const auto text = cli({c, "--help"}).out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("  --", 0) != 0 || line.find("--help") != std::string::npos) continue;
      INFO(c << ": " << line);
      const bool required = line.find("REQUIRED") != std::string::npos;
      const bool described = line.find("(default:") != std::string::npos;
      CHECK((required || described || line.find('[') != std::string::npos));
    }
  }
}

TEST_CASE("exit codes") {
  EnvGuard env(nullptr);
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"run-so", "--bogus", "1"}).code == 1);
  CHECK(cli({"run-so", "--n", "ten"}).code == 1);
  CHECK(cli({"gen-weights", "--n", "10", "--k", "3", "--out", "/dev/null"}).code == 1);
  CHECK(cli({"run-so", "--stages", "BL,XX", "--out", "/dev/null"}).code == 1);
  CHECK(cli({"metrics"}).code == 1);
  CHECK(cli({"tsp-demo", "--preset", "eq9"}).code == 1);
  const auto missing = cli({"metrics", "--runs", "/nonexistent/runs.csv"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("nonexistent") != std::string::npos);
}

TEST_CASE("config file reproduces the effective settings") {
  EnvGuard env(nullptr);
  const auto d = scratch("config");
  const auto first = (d / "a.toml").string(), second = (d / "b.toml").string();
  // --write-config also runs the command, so keep the runs small and inside d
  const auto out = [&](const char* name) { return (d / name).string(); };
  const std::vector<std::vector<std::string>> invocations = {
      {"run-so", "--n", "20", "--alpha", "3.3e-6", "--stages", "BL,AL", "--shift", "variance",
       "--resets", "10", "--out", out("runs.csv")},
      {"sweep", "--n", "20", "--alphas", "1e-7", "2.5e-6", "--seeds", "2", "--jobs", "2", "--seed",
       "9", "--resets", "10", "--out", out("sweep")},
      {"effort", "--n", "20", "--resets", "10", "--resets", "30", "--novelty-rule", "energy_band",
       "--out", out("effort")},
      {"tsp-demo", "--preset", "four-city", "--cities", "4"},
      {"export", "--in", out("no sweep here"), "--artifact", "pareto"},
  };
  for (const auto& args : invocations) {
    INFO(args[0]);
    const auto text = effective_config(args);
    write_file_atomic(first, text);
    CHECK(effective_config({"--config", first}) == text);
    // a flag still overrides the file
    auto with_flag = std::vector<std::string>{"--config", first, args[0], "--help"};
    CHECK(cli(with_flag).code == 0);
    // --write-config writes exactly the same text
    auto args2 = args;
    args2.insert(args2.end(), {"--write-config", second});
    (void)cli(args2);
    CHECK(read_file(second) == text);
  }
  const auto text = effective_config({"run-so", "--config", first});
  CHECK(text.find("[export]") == std::string::npos);
  CHECK(effective_config({"--config", first, "export", "--artifact", "distributions"})
            .find("artifact = \"distributions\"") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("master seed precedence: flag, then config file, then environment") {
  const auto d = scratch("seed");
  const auto file = (d / "c.toml").string();
  {
    EnvGuard env("77");
    CHECK(effective_config({"gen-weights"}).find("seed = 77\n") != std::string::npos);
    CHECK(effective_config({"gen-weights", "--seed", "5"}).find("seed = 5\n") != std::string::npos);
    write_file_atomic(file, "[gen-weights]\nseed = 12\n");
    CHECK(effective_config({"--config", file}).find("seed = 12\n") != std::string::npos);
    CHECK(effective_config({"--config", file, "gen-weights", "--seed", "6"}).find("seed = 6\n") !=
          std::string::npos);
  }
  {
    EnvGuard env(nullptr);
    CHECK(effective_config({"gen-weights"}).find("seed = 1\n") != std::string::npos);
  }
  {
    EnvGuard env("not-a-number");
    CHECK(cli({"gen-weights", "--out", (d / "w.csv").string()}).code == 1);
  }
  fs::remove_all(d);
}

TEST_CASE("identical invocations write identical files") {
  EnvGuard env(nullptr);
  const auto d = scratch("determinism");
  const std::string a = (d / "a.csv").string(), b = (d / "b.csv").string();
  for (const auto& out : {a, b}) {
    CHECK(cli({"run-so", "--n", "20", "--alpha", "1e-3", "--steps", "200", "--resets", "20",
               "--seed", "4", "--out", out})
              .code == 0);
  }
  CHECK(read_file(a) == read_file(b));
  fs::remove_all(d);
}

TEST_CASE("run-so under a master seed equals the first sweep cell") {
  EnvGuard env(nullptr);
  const auto d = scratch("cell");
  const std::string runs = (d / "runs.csv").string();
  const auto wdir = (d / "w").string();
  REQUIRE(cli({"run-so", "--n", "20", "--alpha", "2e-4", "--steps", "200", "--resets", "20",
               "--seed", "8", "--out", runs, "--weights-dir", wdir})
              .code == 0);
  REQUIRE(cli({"sweep", "--n", "20", "--alphas", "2e-4", "--seeds", "1", "--steps", "200",
               "--resets", "20", "--seed", "8", "--out", (d / "sw").string()})
              .code == 0);
  CHECK(read_file(runs) == read_file(d / "sw" / "runs.csv"));
  REQUIRE(cli({"gen-weights", "--n", "20", "--seed", "8", "--out", (d / "g.csv").string()}).code ==
          0);
  CHECK(read_file(d / "g.csv") == read_file(d / "w" / "weights_initial.csv"));
  CHECK(fs::exists(d / "w" / "weights_learned.csv"));

  // metrics over runs.csv reproduces the sweep's scores
  REQUIRE(cli({"metrics", "--runs", runs, "--out", (d / "m").string()}).code == 0);
  CHECK(read_file(d / "m" / "scores.csv") == read_file(d / "sw" / "scores.csv"));
  CHECK(read_file(d / "m" / "baseline.json") == read_file(d / "sw" / "baseline.json"));

  const auto ex = cli({"export", "--in", (d / "sw").string(), "--artifact", "scores_curve"});
  CHECK(ex.code == 0);
  CHECK(fs::exists(d / "sw" / "export" / "scores_curve.csv"));
  fs::remove_all(d);
}

TEST_CASE("demos") {
  EnvGuard env(nullptr);
  const auto fc = cli({"tsp-demo", "--cities", "4", "--preset", "four-city"});
  CHECK(fc.code == 0);
  CHECK(fc.out.find("B -> D -> A -> C") != std::string::npos);
  const auto tsp = cli({"tsp-demo", "--cities", "5", "--restarts", "50"});
  CHECK(tsp.code == 0);
  CHECK(tsp.out.find("best tour") != std::string::npos);
  const auto rec = cli({"recall-demo", "--n", "100", "--patterns", "5", "--corrupt", "0.1"});
  CHECK(rec.code == 0);
  CHECK(rec.out.find("exact recall") != std::string::npos);
}

TEST_CASE("effort writes one runs file per budget") {
  EnvGuard env(nullptr);
  const auto d = scratch("effort");
  const auto r = cli({"effort", "--n", "20", "--resets", "10", "--resets", "20", "--steps", "100",
                      "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(d / "runs_R10.csv"));
  CHECK(fs::exists(d / "runs_R20.csv"));
  CHECK(fs::exists(d / "effort.json"));
  fs::remove_all(d);
}
