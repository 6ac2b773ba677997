#pragma once

#include <cstdint>
#include <span>

namespace memstab {

/// Sum of `values` rounded once to the nearest double (ties to even), so the
/// result does not depend on the order of the input.
double exact_sum(std::span<const double> values);

/// Arithmetic mean rounded once to the nearest double.
double exact_mean(std::span<const double> values);

/// sum(w_i * x_i) / sum(w_i), rounded once to the nearest double.
/// Weights must be positive and their total below 2^53.
double exact_weighted_mean(std::span<const double> values, std::span<const std::uint64_t> weights);

}  // namespace memstab
