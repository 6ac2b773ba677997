#include "memstab/summation.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "memstab/error.hpp"

namespace memstab {
namespace {

// Non-overlapping partials (Shewchuk); their sum is the exact value.
class Accumulator {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  // Adds a * b without rounding.
  void add_product(double a, double b) {
    const double p = a * b;
    add(p);
    add(std::fma(a, b, -p));
  }

  void scale_by_two() {
    for (double& p : partials_) p *= 2.0;
  }

  double round() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // Half-way case: the remaining partials decide the direction.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

// Sign of 2 * (sum - q * w) - step * w, i.e. of sum - (q + step / 2) * w.
int midpoint_sign(const Accumulator& sum, double q, double step, double w) {
  Accumulator r = sum;
  r.add_product(-q, w);
  r.scale_by_two();
  r.add_product(-step, w);
  const double v = r.round();
  return (v > 0.0) - (v < 0.0);
}

bool even_mantissa(double x) {
  int exp = 0;
  const double m = std::frexp(x, &exp);
  const auto bits = static_cast<std::int64_t>(std::ldexp(m, std::numeric_limits<double>::digits));
  return bits % 2 == 0;
}

// Nearest double to sum / w for a positive integer w.
double divide(const Accumulator& sum, double w) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double q = sum.round() / w;
  for (;;) {
    const double up = std::nextafter(q, kInf);
    const int s = midpoint_sign(sum, q, up - q, w);
    if (s > 0 || (s == 0 && !even_mantissa(q))) {
      q = up;
      continue;
    }
    const double down = std::nextafter(q, -kInf);
    const int t = midpoint_sign(sum, q, down - q, w);
    if (t < 0 || (t == 0 && !even_mantissa(q))) {
      q = down;
      continue;
    }
    return q;
  }
}

}  // namespace

double exact_sum(std::span<const double> values) {
  Accumulator acc;
  for (double v : values) acc.add(v);
  return acc.round();
}

double exact_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kNoData, "mean of an empty collection");
  Accumulator acc;
  for (double v : values) acc.add(v);
  return divide(acc, static_cast<double>(values.size()));
}

double exact_weighted_mean(std::span<const double> values,
                           std::span<const std::uint64_t> weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::kValidation, "weighted mean: value and weight counts differ");
  }
  Accumulator acc;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] == 0) throw Error(ErrorCode::kValidation, "weighted mean: zero weight");
    acc.add_product(values[i], static_cast<double>(weights[i]));
    total += weights[i];
  }
  if (total == 0) throw Error(ErrorCode::kNoData, "weighted mean of an empty collection");
  if (total >= (std::uint64_t{1} << 53)) {
    throw Error(ErrorCode::kValidation, "weighted mean: total weight too large");
  }
  return divide(acc, static_cast<double>(total));
}

}  // namespace memstab
