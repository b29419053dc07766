#include "gls/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "gls/errors.hpp"

namespace gls {

namespace {

constexpr Index kValidationCylinders = 1000;

}  // namespace

Placement::Placement(std::vector<Index> prefix) : prefix_(std::move(prefix)) {
  inverse_.assign(prefix_.size(), 0);
  for (std::size_t p = 0; p < prefix_.size(); ++p) inverse_[prefix_[p]] = p;
}

Placement Placement::permuted(std::vector<Index> prefix) {
  std::vector<bool> seen(prefix.size(), false);
  for (Index i : prefix) {
    if (i >= prefix.size() || seen[i]) {
      throw ConfigError("placement.prefix",
                        "prefix must be a permutation of 0.." + std::to_string(prefix.size() - 1));
    }
    seen[i] = true;
  }
  return Placement(std::move(prefix));
}

Index Placement::index_at(Index position) const noexcept {
  return position < prefix_.size() ? prefix_[position] : position;
}

Index Placement::position_of(Index index) const noexcept {
  return index < inverse_.size() ? inverse_[index] : index;
}

GLSScheme::GLSScheme(WeightFamily weights, Placement placement)
    : weights_(std::move(weights)), placement_(std::move(placement)) {
  const auto& prefix = placement_.prefix();
  if (const auto m = weights_.alphabet_size(); m && prefix.size() > *m) {
    throw ConfigError("placement.prefix", "prefix is longer than the alphabet");
  }
  prefix_left_.reserve(prefix.size());
  CompensatedSum run;
  for (Index index : prefix) {
    prefix_left_.push_back(run.value());
    run += weights_.weight(index);
  }
  prefix_end_ = run.value();
}

double GLSScheme::left_endpoint(Index i) const {
  if (i < prefix_left_.size()) return prefix_left_[placement_.position_of(i)];
  return weights_.cumulative(i);
}

std::optional<Index> GLSScheme::locate(double r) const {
  const std::size_t m = prefix_left_.size();
  if (m > 0) {
    const auto alphabet = weights_.alphabet_size();
    if (r < prefix_end_ || (alphabet && *alphabet == m)) {
      auto it = std::upper_bound(prefix_left_.begin(), prefix_left_.end(), r);
      const auto position = static_cast<Index>(std::max<std::ptrdiff_t>(it - prefix_left_.begin() - 1, 0));
      return placement_.index_at(position);
    }
  }
  return weights_.locate(r);
}

namespace {

std::pair<long double, long double> extended_cylinder(const GLSScheme& scheme, const DigitString& d) {
  long double left = 0.0L, length = 1.0L;
  for (Index j : d.digits) {
    left += length * scheme.left_endpoint(j);
    length *= scheme.weights().weight(j);
  }
  return {left, length};
}

}  // namespace

Cylinder cylinder(const GLSScheme& scheme, const DigitString& d) {
  if (d.digits.empty()) throw PreconditionError("cylinder of an empty digit string");
  Cylinder c;
  const auto [left, length] = extended_cylinder(scheme, d);
  c.left = static_cast<double>(left);
  for (Index j : d.digits) c.length *= scheme.weights().weight(j);
  return c;
}

DigitString encode(const GLSScheme& scheme, double x, std::size_t n) {
  if (n == 0) throw PreconditionError("encode rank must be at least 1");
  if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("encode argument must lie in [0,1]");
  const auto alphabet = scheme.weights().alphabet_size();
  // the last position of a finite alphabet is closed on the right
  const std::optional<Index> closed_index =
      alphabet ? std::optional<Index>(scheme.placement().index_at(*alphabet - 1)) : std::nullopt;
  constexpr double kBelowOne = 0x1.fffffffffffffp-1;

  DigitString out;
  out.digits.reserve(n);
  // extended precision keeps the residual drift far below one ulp of x
  long double r = x;
  for (std::size_t k = 1; k <= n; ++k) {
    std::optional<Index> digit;
    try {
      digit = scheme.locate(static_cast<double>(r));
    } catch (const DigitOverflowError&) {
      throw DigitOverflowError(k);
    }
    if (!digit) throw DeltaInfinityError(k);
    out.digits.push_back(*digit);
    const double upper = (closed_index && *digit == *closed_index) ? 1.0 : kBelowOne;
    const long double next = (r - scheme.left_endpoint(*digit)) / scheme.weights().weight(*digit);
    r = std::clamp<long double>(next, 0.0L, upper);
  }
  return out;
}

double decode(const GLSScheme& scheme, const DigitString& d) {
  if (d.digits.empty()) throw PreconditionError("decode of an empty digit string");
  const auto [left, length] = extended_cylinder(scheme, d);
  // least double inside the closed cylinder, if there is one
  const double nearest = static_cast<double>(left);
  if (nearest >= left) return nearest;
  const double up = std::nextafter(nearest, 2.0);
  return up <= left + length ? up : nearest;
}

bool ValidationReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate_scheme(const GLSScheme& scheme) {
  ValidationReport report;
  const auto& w = scheme.weights();
  const Index count = std::min(kValidationCylinders, w.alphabet_size().value_or(kValidationCylinders));

  std::vector<double> q(count);
  bool positive = true;
  Index bad = 0;
  for (Index i = 0; i < count; ++i) {
    q[i] = w.weight(i);
    if (!(q[i] > 0.0)) {
      if (positive) bad = i;
      positive = false;
    }
  }
  report.checks.push_back({"positivity", positive,
                           positive ? "first " + std::to_string(count) + " weights positive"
                                    : "weight " + std::to_string(bad) + " is not positive"});

  CompensatedSum mass;
  for (double v : q) mass += v;
  mass += w.tail_sum_from(count);
  const double total = mass.value();
  {
    std::ostringstream detail;
    detail.precision(17);
    detail << "partial sum plus tail = " << total;
    report.checks.push_back({"mass", std::fabs(total - 1.0) <= 1e-12, detail.str()});
  }

  // in packing order: a_next = a_prev + q_prev and no interior overlaps
  bool packed = true;
  bool disjoint = true;
  double worst_gap = 0.0;
  for (Index p = 0; p + 1 < count; ++p) {
    const Index cur = scheme.placement().index_at(p);
    const Index next = scheme.placement().index_at(p + 1);
    const double end = scheme.left_endpoint(cur) + w.weight(cur);
    const double gap = scheme.left_endpoint(next) - end;
    worst_gap = std::max(worst_gap, std::fabs(gap));
    if (std::fabs(gap) > 1e-12) packed = false;
    if (gap < -1e-14) disjoint = false;
  }
  for (Index i = 0; i < count; ++i) {
    const double left = scheme.left_endpoint(i);
    if (left < 0.0 || left + w.weight(i) > 1.0 + 1e-12) disjoint = false;
  }
  {
    std::ostringstream detail;
    detail << "max |a_next - (a_prev + q_prev)| = " << worst_gap;
    report.checks.push_back({"packing", packed, detail.str()});
  }
  report.checks.push_back({"disjoint_interiors", disjoint,
                           "first " + std::to_string(count) + " rank-1 cylinders"});
  report.checks.push_back({"delta_infinity_countable", scheme.delta_infinity_countable(),
                           "left-to-right packing"});
  return report;
}

}  // namespace gls
