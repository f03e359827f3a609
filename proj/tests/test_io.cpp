#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "solab/errors.hpp"
#include "solab/io.hpp"
#include "solab/weights.hpp"

using namespace solab;
namespace fs = std::filesystem;

TEST_CASE("reals print shortest and parse back exactly") {
  for (double x : {0.1, -132.59999999999997, 1e-9, 5.3366992312063122e-07, 0.0, -0.0, 1e300}) {
    CHECK(parse_real(format_real(x), "x") == x);
  }
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(3e-8) == "3e-08");
  CHECK_THROWS_AS(parse_real("1.5x", "x"), IoError);
  CHECK_THROWS_AS(parse_real("", "x"), IoError);
  CHECK(parse_u64("42", "n") == 42);
  CHECK_THROWS_AS(parse_u64("-1", "n"), IoError);
  CHECK_THROWS_AS(parse_u64("4.0", "n"), IoError);
}

TEST_CASE("csv parsing") {
  const auto t = parse_csv("a,b\n1,2\r\n3,4\n", "t");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), IoError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n", "t"), IoError);
  CHECK_THROWS_AS(parse_csv("", "t"), IoError);
}

TEST_CASE("runs.csv round trip") {
  std::vector<EnergySample> s = {
      {Stage::before_learning, 0.0, 0, 0, -130.4, true},
      {Stage::learning, 5e-7, 3, 1, -128.79999999999998, false},
      {Stage::after_learning, 5e-7, 3, 2, -150.2, true},
  };
  const auto text = runs_csv(s);
  CHECK(text.rfind(std::string(kRunsHeader) + "\n", 0) == 0);
  CHECK(text.find("AL,5e-07,3,2,-150.2,1") != std::string::npos);
  CHECK(parse_runs_csv(parse_csv(text, "runs")) == s);
  CHECK_THROWS_AS(parse_runs_csv(parse_csv("stage,alpha\nBL,0\n", "runs")), IoError);
}

TEST_CASE("scores.csv round trip") {
  CreativityScores c;
  c.alpha = 4e-7;
  c.novelty = 0.9;
  c.value = 0.99;
  c.convergence = 0.95;
  c.appropriateness = 0.9405;
  c.p_1sigma = 1;
  c.p_2sigma = 0.8;
  c.p_3sigma = 0.5;
  c.regime = Regime::novel_and_appropriate;
  const auto text = scores_csv({c});
  CHECK(text.rfind(std::string(kScoresHeader) + "\n", 0) == 0);
  const auto back = parse_scores_csv(parse_csv(text, "scores"));
  REQUIRE(back.size() == 1);
  CHECK(back[0].alpha == c.alpha);
  CHECK(back[0].appropriateness == c.appropriateness);
  CHECK(back[0].p_3sigma == c.p_3sigma);
  CHECK(back[0].regime == c.regime);
}

TEST_CASE("baseline.json round trip and keys") {
  const BaselineFit f{-127.2, 7.0, 49.0, 1000, -150.4, -104.0};
  const auto text = baseline_json(f);
  for (const char* key : {"\"mu_BL\"", "\"sigma_BL\"", "\"lambda\"", "\"sample_count\"", "\"min\"",
                          "\"max\""})
    CHECK(text.find(key) != std::string::npos);
  const auto back = parse_baseline_json(text);
  CHECK(back.mu == f.mu);
  CHECK(back.sigma == f.sigma);
  CHECK(back.lambda == f.lambda);
  CHECK(back.sample_count == f.sample_count);
  CHECK(back.min == f.min);
  CHECK(back.max == f.max);
  CHECK_THROWS_AS(parse_baseline_json("{\"mu_BL\": 1}"), IoError);
  CHECK_THROWS_AS(parse_baseline_json("not json"), IoError);
}

TEST_CASE("weight matrix csv round trip") {
  const auto w = modular_weights({10, 5, 0.3, 4});
  const auto back = parse_matrix_csv(matrix_csv(w));
  CHECK(back == w);
  CHECK_THROWS(parse_matrix_csv("0,1\n2,0\n"));
  CHECK_THROWS(parse_matrix_csv("0,1\n1\n"));
}

TEST_CASE("atomic writes create directories and leave no temporary file") {
  const fs::path dir = fs::temp_directory_path() / "solab_io_test";
  fs::remove_all(dir);
  const auto file = dir / "sub" / "x.txt";
  write_file_atomic(file, "hello\n");
  CHECK(read_file(file) == "hello\n");
  write_file_atomic(file, "again\n");
  CHECK(read_file(file) == "again\n");
  CHECK_FALSE(fs::exists(file.string() + ".part"));
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), IoError);
  fs::remove_all(dir);
}
