#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace gls {

/// Digit / weight index in N_0.
using Index = std::uint64_t;

/// Open upper end of an index range.
inline constexpr Index kUnbounded = std::numeric_limits<Index>::max();

/// Two-sided estimate of a (possibly divergent) positive series.
///
/// A divergent series is represented by `upper = +inf` together with the
/// largest finite double as `lower`; any finite number is a valid lower bound
/// for an infinite sum, and this one makes every "sum >= c" test succeed.
struct SeriesBound {
  double lower = 0.0;
  double upper = 0.0;

  static SeriesBound divergent() noexcept {
    return {std::numeric_limits<double>::max(),
            std::numeric_limits<double>::infinity()};
  }
  static SeriesBound exact(double v) noexcept { return {v, v}; }

  bool diverges() const noexcept { return std::isinf(upper); }
  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

/// Termwise sum of two bounds; divergence is absorbing.
inline SeriesBound operator+(SeriesBound a, SeriesBound b) noexcept {
  if (a.diverges() || b.diverges()) return SeriesBound::divergent();
  return {a.lower + b.lower, a.upper + b.upper};
}

/// Widen a bound by a relative amount to absorb floating-point rounding.
inline SeriesBound widen(SeriesBound b, double rel) noexcept {
  if (b.diverges()) return b;
  return {std::fmax(0.0, b.lower * (1.0 - rel)), b.upper * (1.0 + rel)};
}

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Relative slack applied to compensated sums of correctly rounded terms.
inline constexpr double kSumSlack = 32.0 * std::numeric_limits<double>::epsilon();

}  // namespace gls
