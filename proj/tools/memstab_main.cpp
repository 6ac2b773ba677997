// memstab: memory-stability analysis over profiled runs of program variants.
//
//   memstab transform traces.jsonl --out mpp.jsonl
//   memstab dmpd mpp.jsonl --out pairwise.csv
//   memstab aggregate pairwise.csv --out scores.csv
//   memstab nmv mpp.jsonl --out nmv.csv
//   memstab ablate traces.jsonl [--grid grid.json] --out sensitivity.csv
//   memstab correlate --se-metrics se.csv --pairwise pairwise.csv --nmv-means nmv_means.csv
//   memstab report traces.jsonl --out results/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "memstab/commands.hpp"
#include "memstab/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  memstab::Bytes quant_bytes = 64;
  std::int64_t stride = 1;
  std::int64_t pmin_bytes = 102400;
  bool clip_nmv = false;
  bool exact = false;
  std::string out;
  std::string log_level = "info";
  std::string run_summary;
  unsigned jobs = 0;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw memstab::Error(memstab::ErrorCode::kIo, "cannot read '" + path + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw memstab::Error(memstab::ErrorCode::kIo, "cannot write '" + path.string() + "'");
  return out;
}

// Writes to --out when given, otherwise to stdout.
void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    open_output(g.out) << text;
  }
}

void emit_exact(const GlobalOptions& g, const json& payload) {
  if (!g.exact) return;
  open_output(g.out + ".exact.json") << payload.dump(2) << '\n';
}

fs::path sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  return p.parent_path() / (p.stem().string() + suffix);
}

void finish(const GlobalOptions& g, memstab::RunSummary summary) {
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < summary.warnings.size(); ++i) {
    if (i < kShown) {
      spdlog::warn("{}", summary.warnings[i]);
    } else {
      spdlog::debug("{}", summary.warnings[i]);
    }
  }
  if (summary.warnings.size() > kShown) {
    spdlog::warn("... {} more warnings (use --log-level debug)", summary.warnings.size() - kShown);
  }
  json doc = summary.to_json();
  if (const char* seed = std::getenv("MEMSTAB_SEED")) doc["seed"] = seed;
  std::cerr << json{{"run_summary", doc}}.dump() << '\n';
  if (!g.run_summary.empty()) open_output(g.run_summary) << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-stability metrics for profiled program variants"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  auto* quant_opt = app.add_option("--quant-bytes", g.quant_bytes,
                                   "Quantization grid in bytes (overrides each trace's own)")
                        ->check(CLI::NonNegativeNumber);
  app.add_option("--stride", g.stride, "Extra line-stride decimation applied before transform")
      ->check(CLI::PositiveNumber);
  app.add_option("--pmin-bytes", g.pmin_bytes, "Minimum peak for NMV eligibility")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--clip-nmv", g.clip_nmv, "Clip NMV to [0, 1]");
  app.add_flag("--exact", g.exact, "Also write full-precision values to <out>.exact.json");
  app.add_option("--out", g.out, "Output path (directory for `report`); stdout if omitted");
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off");
  app.add_option("--run-summary", g.run_summary, "Write the JSON run summary to this path");
  app.add_option("--jobs", g.jobs, "Worker threads for pairwise DMPD (0 = all cores)");

  std::string input;
  std::optional<std::string> model;
  std::optional<double> temperature;

  auto* transform = app.add_subcommand("transform", "JSONL traces -> monotonic peak profiles");
  transform->add_option("traces", input, "Trace JSONL file")->required();
  transform->add_option("--model", model, "Keep only traces from this model");
  transform->add_option("--temperature", temperature, "Keep only traces at this temperature");

  auto* dmpd = app.add_subcommand("dmpd", "Profile store -> pairwise DMPD CSV");
  dmpd->add_option("mpp_store", input, "MPP JSONL store")->required();

  std::string summary_path;
  auto* aggregate = app.add_subcommand("aggregate", "Pairwise CSV -> D_p table and MIS summary");
  aggregate->add_option("pairwise", input, "Pairwise DMPD CSV")->required();
  aggregate->add_option("--summary", summary_path, "Where to write the MIS summary CSV");

  std::string means_path;
  auto* nmv = app.add_subcommand("nmv", "Profile store -> NMV table and per-solution means");
  nmv->add_option("mpp_store", input, "MPP JSONL store")->required();
  nmv->add_option("--means-out", means_path, "Per-solution mean table (default <out>_means.csv)");

  std::string grid_path;
  auto* ablate = app.add_subcommand("ablate", "Sensitivity of MIS to profiling knobs");
  ablate->add_option("traces", input, "Trace JSONL file")->required();
  ablate->add_option("--grid", grid_path, "JSON settings grid (default: built-in grid)");

  std::string se_path;
  std::string pairwise_path;
  std::string nmv_means_path;
  auto* correlate = app.add_subcommand("correlate", "Stability proxies vs SE metrics");
  correlate->add_option("--se-metrics", se_path, "SE metrics CSV")->required();
  correlate->add_option("--pairwise", pairwise_path, "Pairwise DMPD CSV (DMPD proxy)");
  correlate->add_option("--nmv-means", nmv_means_path, "Per-solution NMV means CSV (NMV proxy)");

  auto* report = app.add_subcommand("report", "transform -> dmpd -> aggregate -> nmv into --out");
  report->add_option("traces", input, "Trace JSONL file")->required();
  report->add_option("--model", model, "Keep only traces from this model");
  report->add_option("--temperature", temperature, "Keep only traces at this temperature");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("memstab");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  memstab::TransformOptions transform_opts;
  if (quant_opt->count() > 0) transform_opts.quant_bytes = g.quant_bytes;
  transform_opts.stride = g.stride;
  transform_opts.model = model;
  transform_opts.temperature = temperature;

  memstab::NMVConfig nmv_config;
  nmv_config.p_min = g.pmin_bytes;
  nmv_config.clip_to_unit = g.clip_nmv;

  try {
    if (g.exact && g.out.empty() && !report->parsed()) {
      throw memstab::Error(memstab::ErrorCode::kConfiguration, "--exact requires --out");
    }
    json exact;
    json* exact_ptr = g.exact ? &exact : nullptr;

    if (transform->parsed()) {
      auto in = open_input(input);
      std::ostringstream out;
      auto summary = memstab::cmd_transform(in, out, transform_opts);
      emit(g, out.str());
      finish(g, std::move(summary));
    } else if (dmpd->parsed()) {
      auto in = open_input(input);
      std::ostringstream out;
      auto summary = memstab::cmd_dmpd(in, out, exact_ptr, g.jobs);
      emit(g, out.str());
      emit_exact(g, exact);
      finish(g, std::move(summary));
    } else if (aggregate->parsed()) {
      auto in = open_input(input);
      std::ostringstream scores;
      std::ostringstream model_summary;
      auto summary = memstab::cmd_aggregate(in, scores, model_summary, exact_ptr);
      if (g.out.empty()) {
        std::cout << scores.str() << '\n' << model_summary.str();
      } else {
        emit(g, scores.str());
        std::cout << model_summary.str();
      }
      if (!summary_path.empty()) open_output(summary_path) << model_summary.str();
      emit_exact(g, exact);
      finish(g, std::move(summary));
    } else if (nmv->parsed()) {
      auto in = open_input(input);
      std::ostringstream records;
      std::ostringstream means;
      auto summary = memstab::cmd_nmv(in, records, means, nmv_config, exact_ptr);
      if (g.out.empty()) {
        std::cout << records.str() << '\n' << means.str();
        if (!means_path.empty()) open_output(means_path) << means.str();
      } else {
        emit(g, records.str());
        const fs::path target =
            means_path.empty() ? sibling(g.out, "_means.csv") : fs::path(means_path);
        open_output(target) << means.str();
      }
      emit_exact(g, exact);
      finish(g, std::move(summary));
    } else if (ablate->parsed()) {
      auto grid = memstab::default_ablation_grid();
      if (!grid_path.empty()) {
        auto grid_in = open_input(grid_path);
        json doc;
        try {
          doc = json::parse(grid_in);
        } catch (const json::parse_error& e) {
          throw memstab::Error(memstab::ErrorCode::kConfiguration,
                               std::string("grid: ") + e.what());
        }
        grid = memstab::parse_ablation_grid(doc);
      }
      auto in = open_input(input);
      std::ostringstream out;
      auto summary = memstab::cmd_ablate(in, grid, out, exact_ptr);
      emit(g, out.str());
      emit_exact(g, exact);
      finish(g, std::move(summary));
    } else if (correlate->parsed()) {
      auto se = open_input(se_path);
      std::optional<std::ifstream> pairwise_in;
      std::optional<std::ifstream> nmv_in;
      if (!pairwise_path.empty()) pairwise_in = open_input(pairwise_path);
      if (!nmv_means_path.empty()) nmv_in = open_input(nmv_means_path);
      std::ostringstream out;
      auto summary = memstab::cmd_correlate(pairwise_in ? &*pairwise_in : nullptr,
                                            nmv_in ? &*nmv_in : nullptr, se, out);
      emit(g, out.str());
      finish(g, std::move(summary));
    } else if (report->parsed()) {
      if (g.out.empty()) {
        throw memstab::Error(memstab::ErrorCode::kConfiguration,
                             "report needs --out <directory>");
      }
      memstab::ReportOptions options;
      options.transform = transform_opts;
      options.nmv = nmv_config;
      options.exact = g.exact;
      options.workers = g.jobs;
      auto summary = memstab::cmd_report(input, g.out, options);
      std::ifstream model_summary(fs::path(g.out) / "summary.csv");
      std::cout << model_summary.rdbuf();
      finish(g, std::move(summary));
    }
  } catch (const memstab::Error& e) {
    spdlog::error("{} error: {}", memstab::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
