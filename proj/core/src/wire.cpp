#include "memstab/wire.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "memstab/csv.hpp"
#include "memstab/error.hpp"

namespace memstab::wire {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kTraceKeys = {
    "problem_id", "solution_id", "test_id", "model",   "temperature", "sampling_mode",
    "stride",     "interval_ms", "quant_bytes", "samples", "status"};

[[noreturn]] void parse_fail(std::string_view what) {
  throw Error(ErrorCode::kParse, std::string(what));
}

const json& require(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(fmt::format("missing key '{}'", key));
  return *it;
}

std::string require_string(const json& obj, std::string_view key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) parse_fail(fmt::format("key '{}' must be a string", key));
  return v.get<std::string>();
}

std::int64_t as_integer(const json& v, std::string_view key) {
  if (!v.is_number_integer()) parse_fail(fmt::format("key '{}' must be an integer", key));
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      parse_fail(fmt::format("key '{}' out of range", key));
    }
    return static_cast<std::int64_t>(u);
  }
  return v.get<std::int64_t>();
}

double as_number(const json& v, std::string_view key) {
  if (!v.is_number()) parse_fail(fmt::format("key '{}' must be a number", key));
  return v.get<double>();
}

json parse_object(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    parse_fail(fmt::format("malformed JSON: {}", e.what()));
  }
  if (!obj.is_object()) parse_fail("line is not a JSON object");
  return obj;
}

TraceKey parse_key(const json& obj) {
  TraceKey key;
  key.problem_id = require_string(obj, "problem_id");
  key.solution_id = require_string(obj, "solution_id");
  key.test_id = require_string(obj, "test_id");
  if (auto it = obj.find("model"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) parse_fail("key 'model' must be a string");
    key.model = it->get<std::string>();
  }
  if (auto it = obj.find("temperature"); it != obj.end() && !it->is_null()) {
    key.temperature = as_number(*it, "temperature");
  }
  return key;
}

void put_key(json& obj, const TraceKey& key) {
  obj["problem_id"] = key.problem_id;
  obj["solution_id"] = key.solution_id;
  obj["test_id"] = key.test_id;
  if (key.model) obj["model"] = *key.model;
  if (key.temperature) obj["temperature"] = *key.temperature;
}

template <typename T, typename Parse>
ReadResult<T> read_lines(std::istream& in, Parse parse) {
  ReadResult<T> result;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      result.items.push_back(parse(line));
    } catch (const Error& e) {
      result.warnings.push_back({number, e.what()});
    }
  }
  return result;
}

}  // namespace

TraceRecord parse_trace(std::string_view line) {
  const json obj = parse_object(line);
  TraceRecord record;
  RawTrace& t = record.trace;
  t.key = parse_key(obj);

  if (auto it = obj.find("sampling_mode"); it != obj.end()) {
    if (!it->is_string()) parse_fail("key 'sampling_mode' must be a string");
    t.sampling_mode = parse_sampling_mode(it->get<std::string>());
  }
  const bool line_mode = t.sampling_mode == SamplingMode::kLine;
  if (auto it = obj.find("stride"); it != obj.end() && line_mode) {
    t.stride = as_integer(*it, "stride");
  }
  if (auto it = obj.find("interval_ms"); it != obj.end() && !line_mode) {
    t.interval_ms = as_number(*it, "interval_ms");
  } else if (!line_mode) {
    parse_fail("time-mode trace without 'interval_ms'");
  }
  if (auto it = obj.find("quant_bytes"); it != obj.end()) {
    t.quant_bytes = as_integer(*it, "quant_bytes");
  }
  if (auto it = obj.find("samples"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) parse_fail("key 'samples' must be an array");
    t.samples.reserve(it->size());
    for (const auto& s : *it) t.samples.push_back(as_integer(s, "samples[]"));
  }
  const auto status = require(obj, "status");
  if (!status.is_string()) parse_fail("key 'status' must be a string");
  t.status = parse_run_status(status.get<std::string>());

  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool inactive_knob = (it.key() == "stride" && !line_mode) ||
                               (it.key() == "interval_ms" && line_mode);
    if (!kTraceKeys.contains(it.key()) || inactive_knob) record.extra[it.key()] = it.value();
  }
  validate(t);
  return record;
}

json to_json(const TraceRecord& record) {
  const RawTrace& t = record.trace;
  json obj = record.extra.is_object() ? record.extra : json::object();
  put_key(obj, t.key);
  obj["sampling_mode"] = to_string(t.sampling_mode);
  if (t.sampling_mode == SamplingMode::kLine) {
    obj["stride"] = t.stride;
  } else {
    obj["interval_ms"] = t.interval_ms;
  }
  obj["quant_bytes"] = t.quant_bytes;
  obj["samples"] = t.samples;
  obj["status"] = to_string(t.status);
  return obj;
}

std::string serialize_trace(const TraceRecord& record) { return to_json(record).dump(); }

ReadResult<TraceRecord> read_traces(std::istream& in) {
  return read_lines<TraceRecord>(in, [](std::string_view l) { return parse_trace(l); });
}

json to_json(const MonotonicPeakProfile& mpp) {
  json obj = json::object();
  put_key(obj, mpp.source);
  obj["values"] = mpp.values;
  obj["peak"] = mpp.peak;
  return obj;
}

MonotonicPeakProfile parse_mpp(std::string_view line) {
  const json obj = parse_object(line);
  MonotonicPeakProfile mpp;
  mpp.source = parse_key(obj);
  const auto& values = require(obj, "values");
  if (!values.is_array() || values.empty()) parse_fail("key 'values' must be a non-empty array");
  for (const auto& v : values) mpp.values.push_back(as_number(v, "values[]"));
  mpp.peak = as_number(require(obj, "peak"), "peak");

  if (mpp.values.front() != 0.0 ||
      !std::is_sorted(mpp.values.begin(), mpp.values.end()) ||
      mpp.peak != mpp.values.back()) {
    throw Error(ErrorCode::kValidation,
                fmt::format("profile ({}, {}, {}) is not a valid monotonic peak profile",
                            mpp.source.problem_id, mpp.source.solution_id,
                            mpp.source.test_id));
  }
  return mpp;
}

ReadResult<MonotonicPeakProfile> read_mpp_store(std::istream& in) {
  return read_lines<MonotonicPeakProfile>(in, [](std::string_view l) { return parse_mpp(l); });
}

void write_mpp_store(std::ostream& out, std::span<const MonotonicPeakProfile> mpps) {
  for (const auto& mpp : mpps) out << to_json(mpp).dump() << '\n';
}

void write_pairwise_csv(std::ostream& out, std::span<const PairwiseDistanceRecord> records) {
  csv::write_row(out, {"problem_id", "test_id", "sol_i", "sol_j", "dmpd"});
  for (const auto& r : records) {
    csv::write_row(out, {r.problem_id, r.test_id, r.sol_i, r.sol_j, csv::fixed6(r.dmpd)});
  }
}

std::vector<PairwiseDistanceRecord> read_pairwise_csv(std::istream& in) {
  const auto table = csv::read(in);
  const auto c_problem = table.column("problem_id");
  const auto c_test = table.column("test_id");
  const auto c_i = table.column("sol_i");
  const auto c_j = table.column("sol_j");
  const auto c_dmpd = table.column("dmpd");
  std::vector<PairwiseDistanceRecord> records;
  for (const auto& row : table.rows) {
    PairwiseDistanceRecord r{row[c_problem], row[c_test], row[c_i], row[c_j],
                             csv::parse_double(row[c_dmpd], "dmpd")};
    if (!(r.dmpd >= 0.0 && r.dmpd <= 1.0)) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("dmpd {} outside [0, 1] ({}, {}, {}, {})", row[c_dmpd],
                              r.problem_id, r.test_id, r.sol_i, r.sol_j));
    }
    if (!(r.sol_i < r.sol_j)) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("pair ({}, {}) must satisfy sol_i < sol_j", r.sol_i, r.sol_j));
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_scores_csv(std::ostream& out, std::span<const ProblemScore> scores) {
  csv::write_row(out, {"problem_id", "d_p", "n_pairs", "n_tests", "weight"});
  for (const auto& s : scores) {
    csv::write_row(out, {s.problem_id, csv::fixed6(s.d_p), std::to_string(s.n_pairs),
                         std::to_string(s.n_tests), std::to_string(s.weight)});
  }
}

void write_summary_csv(std::ostream& out, const ModelScore& model) {
  csv::write_row(out, {"metric", "value"});
  csv::write_row(out, {"mis_macro", csv::fixed6(model.mis_macro)});
  csv::write_row(out, {"mis_micro", csv::fixed6(model.mis_micro)});
  csv::write_row(out, {"n_problems", std::to_string(model.n_problems)});
}

void write_nmv_csv(std::ostream& out, std::span<const NMVRecord> records) {
  csv::write_row(out, {"problem_id", "solution_id", "test_id", "max_vel", "median_peak", "nmv",
                       "eligible"});
  for (const auto& r : records) {
    csv::write_row(out, {r.problem_id, r.solution_id, r.test_id, csv::fixed6(r.max_vel),
                         csv::fixed6(r.median_peak), csv::fixed6(r.nmv),
                         r.eligible ? "true" : "false"});
  }
}

void write_nmv_means_csv(std::ostream& out, std::span<const NMVSolutionMean> means) {
  csv::write_row(out, {"problem_id", "solution_id", "mean_nmv", "n_tests"});
  for (const auto& m : means) {
    csv::write_row(out, {m.problem_id, m.solution_id, csv::fixed6(m.mean_nmv),
                         std::to_string(m.n_tests)});
  }
}

std::vector<NMVSolutionMean> read_nmv_means_csv(std::istream& in) {
  const auto table = csv::read(in);
  const auto c_problem = table.column("problem_id");
  const auto c_solution = table.column("solution_id");
  const auto c_mean = table.column("mean_nmv");
  const auto c_n = table.column("n_tests");
  std::vector<NMVSolutionMean> out;
  for (const auto& row : table.rows) {
    out.push_back({row[c_problem], row[c_solution], csv::parse_double(row[c_mean], "mean_nmv"),
                   static_cast<std::size_t>(csv::parse_int(row[c_n], "n_tests"))});
  }
  return out;
}

std::vector<SEMetricsRow> read_se_metrics_csv(std::istream& in) {
  const auto table = csv::read(in);
  const auto c_problem = table.column("problem_id");
  const auto c_solution = table.column("solution_id");
  const auto c_cog = table.column("cognitive_complexity");
  const auto c_cyc = table.column("cyclomatic_complexity");
  const auto c_mi = table.column("maintainability_index");
  std::vector<SEMetricsRow> out;
  for (const auto& row : table.rows) {
    out.push_back({row[c_problem], row[c_solution],
                   csv::parse_double(row[c_cog], "cognitive_complexity"),
                   csv::parse_double(row[c_cyc], "cyclomatic_complexity"),
                   csv::parse_double(row[c_mi], "maintainability_index")});
  }
  return out;
}

}  // namespace memstab::wire
