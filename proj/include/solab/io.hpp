#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "solab/metrics.hpp"
#include "solab/network.hpp"
#include "solab/self_opt.hpp"

namespace solab {

/// Shortest decimal that parses back to the same double ('.' separator).
std::string format_real(double value);
/// Strict parse of a whole field; throws IoError naming `what` on failure.
double parse_real(std::string_view text, std::string_view what);
std::uint64_t parse_u64(std::string_view text, std::string_view what);

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Header row plus rows of comma-separated fields (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws IoError naming the missing column.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, std::string_view source);
CsvTable read_csv(const std::filesystem::path& path);

/// One line of runs.csv.
struct EnergySample {
  Stage stage = Stage::before_learning;
  double alpha = 0.0;
  std::size_t seed = 0;
  std::size_t reset = 0;
  double energy = 0.0;
  bool fixed_point = false;

  friend bool operator==(const EnergySample&, const EnergySample&) = default;
};

inline constexpr std::string_view kRunsHeader = "stage,alpha,seed,reset,final_energy,fixed_point";
inline constexpr std::string_view kScoresHeader =
    "alpha,novelty,value,convergence,appropriateness,p_1sigma,p_2sigma,p_3sigma,regime";

std::string runs_csv(const std::vector<EnergySample>& samples);
std::vector<EnergySample> parse_runs_csv(const CsvTable& table);

std::string scores_csv(const std::vector<CreativityScores>& scores);
/// Reads the columns of scores.csv; the remaining fields stay at their defaults.
std::vector<CreativityScores> parse_scores_csv(const CsvTable& table);

std::string baseline_json(const BaselineFit& fit);
BaselineFit parse_baseline_json(std::string_view text);

/// N lines of N comma-separated reals.
std::string matrix_csv(const WeightMatrix& weights);
WeightMatrix parse_matrix_csv(std::string_view text, WeightRole role = WeightRole::initial);

}  // namespace solab
