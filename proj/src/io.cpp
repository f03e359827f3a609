#include "solab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "solab/errors.hpp"

namespace solab {

namespace fs = std::filesystem;

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text, std::string_view what) {
  double out = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw IoError("bad number '" + std::string(text) + "' in " + std::string(what));
  }
  return out;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw IoError("bad integer '" + std::string(text) + "' in " + std::string(what));
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw IoError("missing column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw IoError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(table.header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw IoError(std::string(source) + ": empty file");
  return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path), path.string()); }

std::string runs_csv(const std::vector<EnergySample>& samples) {
  std::string out(kRunsHeader);
  out += '\n';
  for (const auto& s : samples) {
    out += stage_label(s.stage);
    out += ',';
    out += format_real(s.alpha);
    out += ',';
    out += std::to_string(s.seed);
    out += ',';
    out += std::to_string(s.reset);
    out += ',';
    out += format_real(s.energy);
    out += s.fixed_point ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<EnergySample> parse_runs_csv(const CsvTable& table) {
  const auto c_stage = table.column("stage");
  const auto c_alpha = table.column("alpha");
  const auto c_seed = table.column("seed");
  const auto c_reset = table.column("reset");
  const auto c_energy = table.column("final_energy");
  const auto c_fixed = table.column("fixed_point");
  std::vector<EnergySample> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    EnergySample s;
    try {
      s.stage = parse_stage(row[c_stage]);
    } catch (const ConfigError& e) {
      throw IoError(std::string("runs.csv: ") + e.what());
    }
    s.alpha = parse_real(row[c_alpha], "runs.csv alpha");
    s.seed = parse_u64(row[c_seed], "runs.csv seed");
    s.reset = parse_u64(row[c_reset], "runs.csv reset");
    s.energy = parse_real(row[c_energy], "runs.csv final_energy");
    s.fixed_point = parse_u64(row[c_fixed], "runs.csv fixed_point") != 0;
    out.push_back(s);
  }
  return out;
}

std::string scores_csv(const std::vector<CreativityScores>& scores) {
  std::string out(kScoresHeader);
  out += '\n';
  for (const auto& s : scores) {
    for (double x : {s.alpha, s.novelty, s.value, s.convergence, s.appropriateness, s.p_1sigma,
                     s.p_2sigma, s.p_3sigma}) {
      out += format_real(x);
      out += ',';
    }
    out += regime_label(s.regime);
    out += '\n';
  }
  return out;
}

std::vector<CreativityScores> parse_scores_csv(const CsvTable& table) {
  std::vector<CreativityScores> out;
  const auto col = [&](std::string_view name) { return table.column(name); };
  const std::size_t c[8] = {col("alpha"),           col("novelty"),  col("value"),
                            col("convergence"),     col("appropriateness"),
                            col("p_1sigma"),        col("p_2sigma"), col("p_3sigma")};
  const auto c_regime = col("regime");
  for (const auto& row : table.rows) {
    CreativityScores s;
    double* fields[8] = {&s.alpha,           &s.novelty,  &s.value,    &s.convergence,
                         &s.appropriateness, &s.p_1sigma, &s.p_2sigma, &s.p_3sigma};
    for (int i = 0; i < 8; ++i) *fields[i] = parse_real(row[c[i]], "scores.csv");
    try {
      s.regime = parse_regime(row[c_regime]);
    } catch (const ConfigError& e) {
      throw IoError(std::string("scores.csv: ") + e.what());
    }
    out.push_back(s);
  }
  return out;
}

std::string baseline_json(const BaselineFit& fit) {
  nlohmann::ordered_json j;
  j["mu_BL"] = fit.mu;
  j["sigma_BL"] = fit.sigma;
  j["lambda"] = fit.lambda;
  j["sample_count"] = fit.sample_count;
  j["min"] = fit.min;
  j["max"] = fit.max;
  return j.dump(2) + "\n";
}

BaselineFit parse_baseline_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BaselineFit fit;
    fit.mu = j.at("mu_BL").get<double>();
    fit.sigma = j.at("sigma_BL").get<double>();
    fit.lambda = j.at("lambda").get<double>();
    fit.sample_count = j.at("sample_count").get<std::size_t>();
    fit.min = j.at("min").get<double>();
    fit.max = j.at("max").get<double>();
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("baseline.json: ") + e.what());
  }
}

std::string matrix_csv(const WeightMatrix& weights) {
  const std::size_t n = weights.size();
  std::string out;
  out.reserve(n * n * 6);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out += ',';
      out += format_real(weights(i, j));
    }
    out += '\n';
  }
  return out;
}

WeightMatrix parse_matrix_csv(std::string_view text, WeightRole role) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split_fields(line)) row.push_back(parse_real(f, "weight matrix"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("weight matrix file is empty");
  try {
    return WeightMatrix::from_rows(rows, role);
  } catch (const ContractError& e) {
    throw IoError(std::string("weight matrix: ") + e.what());
  }
}

}  // namespace solab
