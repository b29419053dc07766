#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gls/numeric.hpp"

namespace gls {

enum class FamilyKind { luroth, geometric, golden, loglog, explicit_list };

std::string_view to_string(FamilyKind kind) noexcept;

/// Where the power series sum_i q_i^x starts to converge: it diverges for
/// x < x and, unless `converges_at` is set, also at x itself.
struct Abscissa {
  double x;
  bool converges_at;
};

namespace detail {
struct Luroth {};
struct Geometric {
  double ratio;
};
struct Golden {};
struct LogLog {
  double constant;  // A
  double constant_width;
  std::shared_ptr<const std::vector<double>> cumulative;  // sum_{j<i} q_j
};
struct Explicit {
  std::vector<double> values;
  std::vector<double> prefix;  // prefix[i] = sum_{j<i} values[j]
  std::optional<double> tail_ratio;
  double tail_mass;  // 1 - sum(values)
};
}  // namespace detail

/// The stochastic vector Q = (q_0, q_1, ...) of a GLS expansion.
///
/// Besides the weights, each family knows closed-form (or integral-test)
/// bounds on power sums sum_{first <= i < last} q_i^x, which is what the
/// dimension engine needs to compare the series against 1 with certainty.
class WeightFamily {
 public:
  /// q_i = 1 / ((i+1)(i+2)).
  static WeightFamily luroth();
  /// q_i = (1-r) r^i, r in (0,1).
  static WeightFamily geometric(double ratio);
  /// q_i = phi^-(i+2), phi the golden ratio.
  static WeightFamily golden();
  /// q_i = A / ((i+2) ln^2(i+2)), A normalizing.
  static WeightFamily loglog();
  /// Listed weights, optionally followed by a geometric tail with ratio
  /// `tail_ratio` carrying the remaining mass 1 - sum(values). Without a
  /// tail the alphabet is finite and the values must sum to 1.
  ///
  /// With `checked = false` the mass checks are skipped so that a broken
  /// configuration can still be inspected by validate_scheme.
  static WeightFamily explicit_weights(std::vector<double> values,
                                       std::optional<double> tail_ratio = std::nullopt,
                                       bool checked = true);

  FamilyKind kind() const noexcept;
  std::string describe() const;

  double weight(Index i) const;
  /// Left endpoint of Delta_i under ascending placement: sum_{j<i} q_j.
  double cumulative(Index i) const;
  /// sum_{i>=k} q_i. Exact for the closed-form families; for loglog an
  /// Euler-Maclaurin estimate accurate far below 1e-12.
  double tail_sum_from(Index k) const;
  /// Bounds on sum_{i>=k} q_i^x.
  SeriesBound tail_power_bounds(Index k, double x) const;
  /// Bounds on sum_{first <= i < last} q_i^x; `last` may be kUnbounded.
  /// `resolution` is the panel count used by quadrature-based bounds.
  SeriesBound power_sum_bounds(Index first, Index last, double x,
                               std::size_t resolution = 1024) const;

  double q_max() const;
  /// Number of digits for a finite alphabet, nullopt for N_0.
  std::optional<Index> alphabet_size() const;
  Abscissa abscissa() const;

  /// Largest i with cumulative(i) <= r, i.e. the ascending-order cylinder
  /// holding r under the half-open convention (the last cylinder of a finite
  /// alphabet is closed). nullopt when r lies at or beyond the supremum of
  /// left endpoints of an infinite alphabet. Throws DigitOverflowError when
  /// the index would exceed kMaxDigit.
  std::optional<Index> locate(double r) const;

  static constexpr Index kMaxDigit = Index{1} << 62;

  /// Accessors for parameters; throw PreconditionError on the wrong kind.
  double ratio() const;
  const std::vector<double>& explicit_values() const;
  std::optional<double> tail_ratio() const;
  double loglog_constant() const;
  /// Width of the integral-test bracket on the loglog constant A.
  double loglog_constant_width() const;

 private:
  using Data = std::variant<detail::Luroth, detail::Geometric, detail::Golden,
                            detail::LogLog, detail::Explicit>;
  explicit WeightFamily(Data data) : data_(std::move(data)) {}
  // ln q_i without underflow for the geometric-type families.
  double log_weight(Index i) const;

  Data data_;
};

}  // namespace gls
