#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gls/numeric.hpp"
#include "gls/weights.hpp"

namespace gls {

/// Digit-restriction set V, enumerated in ascending order.
class SupportSet {
 public:
  enum class Kind { finite, cofinite, all };

  /// Throws ConfigError("V") on an empty list or duplicates.
  static SupportSet finite(std::vector<Index> members);
  /// N_0 minus `excluded`. Throws ConfigError("V") on duplicates.
  static SupportSet cofinite(std::vector<Index> excluded);
  static SupportSet all() { return SupportSet(Kind::all, {}); }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::finite; }
  /// Members for finite sets, exclusions for cofinite sets.
  const std::vector<Index>& indices() const noexcept { return indices_; }

  bool contains(Index i) const;
  /// nullopt for infinite sets.
  std::optional<Index> size() const noexcept;
  /// Member with the given 0-based ordinal; precondition ordinal < size().
  Index member(Index ordinal) const;
  /// The truncation V_k: first k members.
  std::vector<Index> first(Index k) const;

  /// "all", "exclude:0,5" or "only:0,2,7".
  std::string describe() const;

 private:
  SupportSet(Kind kind, std::vector<Index> indices) : kind_(kind), indices_(std::move(indices)) {}

  Kind kind_;
  std::vector<Index> indices_;
};

/// Intersect V with the alphabet of `family`; a finite alphabet always gives
/// a finite set. Throws PreconditionError when the result is empty.
SupportSet restrict_to_alphabet(const SupportSet& v, const WeightFamily& family);

enum class Method { finite_root, root, limit, sup };

std::string_view to_string(Method method) noexcept;

struct DimensionResult {
  double value = 0.0;
  Method method = Method::sup;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t evaluations = 0;
  std::vector<std::string> flags;
  /// (k, alpha_k) for the limit route; empty otherwise.
  std::vector<std::pair<Index, double>> sequence;

  bool has_flag(std::string_view flag) const;
};

inline constexpr double kDefaultFiniteTolerance = 1e-10;
inline constexpr double kDefaultCountableTolerance = 1e-8;

double default_tolerance(const SupportSet& v) noexcept;

/// Explicit-term budgets tried in turn when a bound is indecisive.
struct BudgetSchedule {
  std::size_t first = std::size_t{1} << 10;
  std::size_t last = std::size_t{1} << 24;
};

struct LimitOptions {
  Index k_max = Index{1} << 40;
  /// Every k up to this value is computed; beyond it k grows geometrically.
  Index dense_until = 64;
  double growth = 1.25;
  BudgetSchedule schedule{};
};

/// Bounds on phi(x) = sum_{i in V} q_i^x. The first `budget` members are
/// summed explicitly and the rest is bounded through the family's tail
/// bounds. With `limit` set, only the first `limit` members of V count
/// (the truncation V_limit).
SeriesBound phi_bounds(const WeightFamily& family, const SupportSet& v, double x,
                       std::size_t budget, Index limit = kUnbounded);

/// Unique root of sum_{i in V} q_i^x = 1 on [0,1] for finite V, by bisection.
/// tol = 0 bisects down to adjacent doubles.
DimensionResult moran_root_finite(const WeightFamily& family, const SupportSet& v, double tol);

/// sup{x : phi(x) >= 1}, each comparison certified by phi_bounds.
/// Throws IndecisiveBoundError when the schedule runs out.
DimensionResult dim_sup(const WeightFamily& family, const SupportSet& v, double tol,
                        const BudgetSchedule& schedule = {});

/// Root alpha_0 of phi(x) = 1. Throws NoRootError when the series diverges
/// below some point and is already below 1 there.
DimensionResult dim_root(const WeightFamily& family, const SupportSet& v, double tol,
                         const BudgetSchedule& schedule = {});

/// lim alpha_k of the truncation roots. Stops once consecutive computed
/// roots differ by less than tol/4 and the sup bracket confirms agreement
/// within tol; otherwise returns the last alpha_k flagged "SlowConvergence".
DimensionResult dim_limit(const WeightFamily& family, const SupportSet& v, double tol,
                          const LimitOptions& options = {});

/// Default route: finite V by the Moran root, otherwise the sup formula
/// cross-checked against the limit route.
DimensionResult dim_hausdorff(const WeightFamily& family, const SupportSet& v, double tol);

}  // namespace gls
