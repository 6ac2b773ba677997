#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memstab {

using Bytes = std::int64_t;

enum class SamplingMode { kLine, kTime };
enum class RunStatus { kOk, kTimeout, kError, kMismatch };

std::string_view to_string(SamplingMode mode);
std::string_view to_string(RunStatus status);
SamplingMode parse_sampling_mode(std::string_view text);
RunStatus parse_run_status(std::string_view text);

/// Identity of one profiled execution: which solution ran which test.
struct TraceKey {
  std::string problem_id;
  std::string solution_id;
  std::string test_id;
  std::optional<std::string> model;
  std::optional<double> temperature;

  friend bool operator==(const TraceKey&, const TraceKey&) = default;
};

/// One profiled execution as produced by the collector.
///
/// `stride` is meaningful in line mode and `interval_ms` in time mode.
/// `quant_bytes` is the quantization grid applied when the trace is turned
/// into a profile; 0 disables quantization.
struct RawTrace {
  TraceKey key;
  SamplingMode sampling_mode = SamplingMode::kLine;
  std::int64_t stride = 1;
  double interval_ms = 0.0;
  Bytes quant_bytes = 64;
  std::vector<Bytes> samples;
  RunStatus status = RunStatus::kOk;
};

/// Throws Error(kInvalidTrace) when the trace breaks a structural invariant
/// (negative samples, empty ok-run, bad sampling metadata).
void validate(const RawTrace& trace);

/// Non-decreasing, baseline-corrected envelope starting at 0.
struct MonotonicPeakProfile {
  std::vector<double> values;
  double peak = 0.0;
  TraceKey source;

  std::size_t size() const noexcept { return values.size(); }
};

/// Profile scaled to peak 1, or all zeros when the peak is 0.
struct UnitPeakProfile {
  std::vector<double> values;
};

/// s'_t = max(0, s_t - s_1). Throws kInvalidTrace on empty input.
std::vector<Bytes> baseline_correct(std::span<const Bytes> samples);

/// Rounds each sample to the nearest multiple of `q`; exact midpoints go up.
/// q <= 0 leaves the series untouched.
std::vector<Bytes> quantize(std::span<const Bytes> samples, Bytes q);

/// Baseline correction, optional quantization (trace.quant_bytes), then the
/// running maximum with p_1 = 0.
///
/// Throws kExcludedRun for a trace whose status is not ok, kInvalidTrace for
/// an empty or malformed one.
MonotonicPeakProfile to_mpp(const RawTrace& trace);

/// Same transform on a bare series; used by tests and the ablation driver.
MonotonicPeakProfile to_mpp(std::span<const Bytes> samples, Bytes quant_bytes);

/// Keeps samples 0, s, 2s, ... and scales the sampling metadata by `s`.
/// Throws kConfiguration when s < 1.
RawTrace resample_stride(const RawTrace& trace, std::int64_t s);

UnitPeakProfile unit_peak(const MonotonicPeakProfile& mpp);

}  // namespace memstab
