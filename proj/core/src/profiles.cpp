#include "memstab/profiles.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "memstab/error.hpp"

namespace memstab {

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::kLine ? "line" : "time";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kTimeout: return "timeout";
    case RunStatus::kError: return "error";
    case RunStatus::kMismatch: return "mismatch";
  }
  return "error";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "line") return SamplingMode::kLine;
  if (text == "time") return SamplingMode::kTime;
  throw Error(ErrorCode::kParse, fmt::format("unknown sampling_mode '{}'", text));
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "ok") return RunStatus::kOk;
  if (text == "timeout") return RunStatus::kTimeout;
  if (text == "error") return RunStatus::kError;
  if (text == "mismatch") return RunStatus::kMismatch;
  throw Error(ErrorCode::kParse, fmt::format("unknown status '{}'", text));
}

void validate(const RawTrace& trace) {
  const auto& key = trace.key;
  auto fail = [&](std::string_view why) {
    throw Error(ErrorCode::kInvalidTrace,
                fmt::format("trace ({}, {}, {}): {}", key.problem_id,
                            key.solution_id, key.test_id, why));
  };
  if (trace.status == RunStatus::kOk && trace.samples.empty()) {
    fail("ok run with no samples");
  }
  if (std::any_of(trace.samples.begin(), trace.samples.end(),
                  [](Bytes b) { return b < 0; })) {
    fail("negative sample");
  }
  if (trace.sampling_mode == SamplingMode::kLine && trace.stride < 1) {
    fail("line-mode stride must be >= 1");
  }
  if (trace.sampling_mode == SamplingMode::kTime &&
      !(trace.interval_ms > 0.0 && std::isfinite(trace.interval_ms))) {
    fail("time-mode interval_ms must be > 0");
  }
  if (trace.quant_bytes < 0) fail("quant_bytes must be >= 0");
  if (key.temperature && !(*key.temperature >= 0.0 && *key.temperature <= 2.0)) {
    fail("temperature outside [0, 2]");
  }
}

std::vector<Bytes> baseline_correct(std::span<const Bytes> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidTrace, "baseline_correct: empty sample series");
  }
  const Bytes base = samples.front();
  std::vector<Bytes> out;
  out.reserve(samples.size());
  for (Bytes s : samples) out.push_back(std::max<Bytes>(0, s - base));
  return out;
}

std::vector<Bytes> quantize(std::span<const Bytes> samples, Bytes q) {
  std::vector<Bytes> out(samples.begin(), samples.end());
  if (q <= 0) return out;
  // floor((2x + q) / 2q) * q is round-half-up on the q grid, in integers.
  for (auto& x : out) {
    const Bytes k = (2 * x + q) / (2 * q);
    x = k * q;
  }
  return out;
}

MonotonicPeakProfile to_mpp(std::span<const Bytes> samples, Bytes quant_bytes) {
  auto corrected = quantize(baseline_correct(samples), quant_bytes);
  MonotonicPeakProfile mpp;
  mpp.values.resize(corrected.size());
  double running = 0.0;
  for (std::size_t t = 0; t < corrected.size(); ++t) {
    if (t > 0) running = std::max(running, static_cast<double>(corrected[t]));
    mpp.values[t] = running;
  }
  mpp.peak = running;
  return mpp;
}

MonotonicPeakProfile to_mpp(const RawTrace& trace) {
  if (trace.status != RunStatus::kOk) {
    throw Error(ErrorCode::kExcludedRun,
                fmt::format("trace ({}, {}, {}) has status {}", trace.key.problem_id,
                            trace.key.solution_id, trace.key.test_id,
                            to_string(trace.status)));
  }
  validate(trace);
  auto mpp = to_mpp(trace.samples, trace.quant_bytes);
  mpp.source = trace.key;
  return mpp;
}

RawTrace resample_stride(const RawTrace& trace, std::int64_t s) {
  if (s < 1) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("resample stride must be >= 1, got {}", s));
  }
  RawTrace out = trace;
  if (s == 1) return out;
  out.samples.clear();
  out.samples.reserve((trace.samples.size() + s - 1) / s);
  for (std::size_t i = 0; i < trace.samples.size(); i += static_cast<std::size_t>(s)) {
    out.samples.push_back(trace.samples[i]);
  }
  if (out.sampling_mode == SamplingMode::kLine) {
    out.stride = trace.stride * s;
  } else {
    out.interval_ms = trace.interval_ms * static_cast<double>(s);
  }
  return out;
}

UnitPeakProfile unit_peak(const MonotonicPeakProfile& mpp) {
  UnitPeakProfile out;
  out.values.resize(mpp.values.size(), 0.0);
  if (mpp.peak > 0.0) {
    for (std::size_t i = 0; i < mpp.values.size(); ++i) {
      out.values[i] = mpp.values[i] / mpp.peak;
    }
  }
  return out;
}

}  // namespace memstab
