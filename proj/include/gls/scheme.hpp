#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gls/numeric.hpp"
#include "gls/weights.hpp"

namespace gls {

/// Order in which rank-1 cylinders are packed into [0,1] from left to right:
/// either ascending index order, or a permutation of {0..m-1} followed by
/// m, m+1, ... in ascending order.
class Placement {
 public:
  static Placement ascending() { return Placement({}); }
  /// Throws ConfigError("placement.prefix") unless `prefix` is a
  /// permutation of {0, ..., prefix.size()-1}.
  static Placement permuted(std::vector<Index> prefix);

  bool is_ascending() const noexcept { return prefix_.empty(); }
  const std::vector<Index>& prefix() const noexcept { return prefix_; }

  /// Index packed at `position`.
  Index index_at(Index position) const noexcept;
  /// Position of `index` in packing order (inverse of index_at).
  Index position_of(Index index) const noexcept;

 private:
  explicit Placement(std::vector<Index> prefix);

  std::vector<Index> prefix_;
  std::vector<Index> inverse_;
};

/// A finite GLS digit string (i_1, ..., i_n).
struct DigitString {
  std::vector<Index> digits;

  std::size_t rank() const noexcept { return digits.size(); }
  bool operator==(const DigitString&) const = default;
};

/// Closed interval [left, left + length].
struct Cylinder {
  double left = 0.0;
  double length = 1.0;

  double right() const noexcept { return left + length; }
};

/// Weights plus placement. Rank-1 cylinders are Delta_i = [a_i, a_i + q_i];
/// every deeper rank is obtained through the orientation-preserving maps
/// S_i(t) = a_i + q_i t.
class GLSScheme {
 public:
  GLSScheme(WeightFamily weights, Placement placement = Placement::ascending());

  const WeightFamily& weights() const noexcept { return weights_; }
  const Placement& placement() const noexcept { return placement_; }

  /// Left endpoint a_i of Delta_i.
  double left_endpoint(Index i) const;
  Cylinder rank_one(Index i) const { return {left_endpoint(i), weights_.weight(i)}; }

  /// Digit of the rank-1 cylinder containing r under the half-open
  /// convention; nullopt when r lies in Delta_infinity.
  std::optional<Index> locate(double r) const;

  /// Left-to-right packing leaves only accumulation points of left
  /// endpoints outside the rank-1 cylinders, so Delta_infinity is at most
  /// countable for every placement this class accepts.
  bool delta_infinity_countable() const noexcept { return true; }

 private:
  WeightFamily weights_;
  Placement placement_;
  // left endpoints of the permuted prefix, by position
  std::vector<double> prefix_left_;
  double prefix_end_ = 0.0;
};

/// Cylinder Delta_{d_1...d_n}. Throws PreconditionError on an empty string.
Cylinder cylinder(const GLSScheme& scheme, const DigitString& d);

/// First n digits of x. Throws DeltaInfinityError carrying the rank at which
/// the residual fell outside every rank-1 cylinder, and DigitOverflowError
/// when a digit does not fit the index type.
DigitString encode(const GLSScheme& scheme, double x, std::size_t n);

/// Left endpoint of cylinder(d): the infimum of all points whose expansion
/// starts with d. The endpoint is rounded up to the least double inside the
/// cylinder when one exists, so |decode(encode(x, n)) - x| never exceeds the
/// cylinder length.
double decode(const GLSScheme& scheme, const DigitString& d);

struct ValidationCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const noexcept;
};

/// Mass (partial sum plus tail), positivity, packing and disjointness over
/// the first 1000 rank-1 cylinders. Never throws for a constructed scheme.
ValidationReport validate_scheme(const GLSScheme& scheme);

}  // namespace gls
