#include "gls/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gls/errors.hpp"

namespace gls {

namespace {

// Truncations with at most this many members are solved as finite Moran
// equations; longer ones through certified range bounds.
constexpr Index kExactTruncation = 4096;

std::vector<Index> sorted_unique(std::vector<Index> v, const char* what) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw ConfigError("V", std::string(what) + " contains duplicates");
  }
  return v;
}

std::size_t resolution_for(std::size_t budget) { return std::max<std::size_t>(64, budget / 4); }

// Decides phi(x) >= 1 through phi_bounds, escalating the explicit budget.
class Comparator {
 public:
  Comparator(const WeightFamily& family, const SupportSet& v, Index limit,
             const BudgetSchedule& schedule)
      : family_(family), v_(v), limit_(limit), schedule_(schedule) {}

  std::optional<bool> at_least_one(double x) {
    const auto members = std::min(v_.size().value_or(kUnbounded), limit_);
    for (std::size_t budget = schedule_.first;; budget *= 2) {
      ++evaluations;
      last = phi_bounds(family_, v_, x, budget, limit_);
      if (last.lower >= 1.0) return true;
      if (last.upper < 1.0) return false;
      // nothing left to refine once every member is summed explicitly
      if (budget >= members || budget * 2 > schedule_.last) return std::nullopt;
    }
  }

  std::size_t evaluations = 0;
  SeriesBound last{};

 private:
  const WeightFamily& family_;
  const SupportSet& v_;
  Index limit_;
  BudgetSchedule schedule_;
};

struct Bracket {
  double lo, hi;
};

// phi >= 1 holds at lo and fails at hi; shrink until hi - lo <= tol.
Bracket bisect(Comparator& cmp, Bracket b, double tol) {
  while (b.hi - b.lo > tol) {
    const double w = b.hi - b.lo;
    const double mid = b.lo + 0.5 * w;
    if (mid <= b.lo || mid >= b.hi) break;
    std::optional<bool> decided = cmp.at_least_one(mid);
    double probe = mid;
    if (!decided) {
      // phi(mid) is too close to 1 to separate; move the test point
      for (double alt : {b.lo + 0.25 * w, b.lo + 0.75 * w}) {
        decided = cmp.at_least_one(alt);
        if (decided) {
          probe = alt;
          break;
        }
      }
      if (!decided) throw IndecisiveBoundError(mid, cmp.last.lower, cmp.last.upper);
    }
    if (*decided) {
      b.lo = probe;
    } else {
      b.hi = probe;
    }
  }
  return b;
}

DimensionResult make_result(Bracket b, Method method, std::size_t evaluations) {
  DimensionResult r;
  r.lo = b.lo;
  r.hi = b.hi;
  r.value = b.lo + 0.5 * (b.hi - b.lo);
  r.method = method;
  r.evaluations = evaluations;
  return r;
}

DimensionResult point_result(double value, Method method, std::size_t evaluations) {
  return make_result({value, value}, method, evaluations);
}

void require_tolerance(double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw PreconditionError("tolerance must be nonnegative");
}

// k = 2, 3, ..., dense_until, then geometric growth, always ending at k_max.
std::vector<Index> truncation_schedule(const LimitOptions& o, Index k_max) {
  std::vector<Index> ks;
  Index k = 2;
  while (k <= k_max) {
    ks.push_back(k);
    if (k == k_max) break;
    Index next = k < o.dense_until
                     ? k + 1
                     : static_cast<Index>(std::ceil(static_cast<double>(k) * o.growth));
    if (next <= k) next = k + 1;
    k = std::min(next, k_max);
  }
  return ks;
}

}  // namespace

IndecisiveBoundError::IndecisiveBoundError(double x, double lower, double upper)
    : Error([&] {
        std::ostringstream msg;
        msg.precision(17);
        msg << "series bound stayed indecisive at x = " << x << ": [" << lower << ", "
            << upper << "] contains 1";
        return msg.str();
      }()),
      x_(x),
      lower_(lower),
      upper_(upper) {}

SupportSet SupportSet::finite(std::vector<Index> members) {
  if (members.empty()) throw ConfigError("V", "finite support set is empty");
  return SupportSet(Kind::finite, sorted_unique(std::move(members), "support list"));
}

SupportSet SupportSet::cofinite(std::vector<Index> excluded) {
  if (excluded.empty()) return all();
  return SupportSet(Kind::cofinite, sorted_unique(std::move(excluded), "exclusion list"));
}

bool SupportSet::contains(Index i) const {
  const bool listed = std::binary_search(indices_.begin(), indices_.end(), i);
  switch (kind_) {
    case Kind::finite: return listed;
    case Kind::cofinite: return !listed;
    case Kind::all: return true;
  }
  return false;
}

std::optional<Index> SupportSet::size() const noexcept {
  if (kind_ == Kind::finite) return indices_.size();
  return std::nullopt;
}

Index SupportSet::member(Index ordinal) const {
  switch (kind_) {
    case Kind::finite:
      if (ordinal >= indices_.size()) throw PreconditionError("support ordinal out of range");
      return indices_[ordinal];
    case Kind::all: return ordinal;
    case Kind::cofinite: {
      Index i = ordinal;
      for (Index e : indices_) {
        if (e > i) break;
        ++i;
      }
      return i;
    }
  }
  return ordinal;
}

std::vector<Index> SupportSet::first(Index k) const {
  if (const auto n = size()) k = std::min(k, *n);
  std::vector<Index> out;
  out.reserve(k);
  if (kind_ == Kind::finite) {
    out.assign(indices_.begin(), indices_.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
  }
  auto excluded = indices_.begin();
  for (Index i = 0; out.size() < k; ++i) {
    while (excluded != indices_.end() && *excluded < i) ++excluded;
    if (excluded != indices_.end() && *excluded == i) continue;
    out.push_back(i);
  }
  return out;
}

std::string SupportSet::describe() const {
  if (kind_ == Kind::all) return "all";
  std::ostringstream out;
  out << (kind_ == Kind::finite ? "only:" : "exclude:");
  for (std::size_t j = 0; j < indices_.size(); ++j) out << (j ? "," : "") << indices_[j];
  return out.str();
}

SupportSet restrict_to_alphabet(const SupportSet& v, const WeightFamily& family) {
  const auto m = family.alphabet_size();
  if (!m) return v;
  std::vector<Index> members;
  if (v.is_finite()) {
    for (Index i : v.indices()) {
      if (i >= *m) throw PreconditionError("support set contains a digit outside the alphabet");
      members.push_back(i);
    }
  } else {
    for (Index i = 0; i < *m; ++i) {
      if (v.contains(i)) members.push_back(i);
    }
  }
  if (members.empty()) throw PreconditionError("support set is empty within the alphabet");
  return SupportSet::finite(std::move(members));
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::finite_root: return "finite_root";
    case Method::root: return "root";
    case Method::limit: return "limit";
    case Method::sup: return "sup";
  }
  return "unknown";
}

bool DimensionResult::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double default_tolerance(const SupportSet& v) noexcept {
  return v.is_finite() ? kDefaultFiniteTolerance : kDefaultCountableTolerance;
}

SeriesBound phi_bounds(const WeightFamily& family, const SupportSet& v, double x,
                       std::size_t budget, Index limit) {
  if (budget == 0) throw PreconditionError("phi_bounds budget must be at least 1");
  const Index members = std::min(v.size().value_or(kUnbounded), limit);
  const Index explicit_count = v.is_finite() ? members : std::min<Index>(budget, members);

  CompensatedSum head;
  Index last_member = 0;
  if (v.kind() == SupportSet::Kind::all) {
    for (Index i = 0; i < explicit_count; ++i) head += std::pow(family.weight(i), x);
    last_member = explicit_count - 1;
  } else {
    const auto listed = v.first(explicit_count);
    for (Index i : listed) head += std::pow(family.weight(i), x);
    if (!listed.empty()) last_member = listed.back();
  }
  SeriesBound total = widen(SeriesBound::exact(head.value()), kSumSlack);
  if (explicit_count == members || explicit_count == 0) return total;

  // remaining members are contiguous indices past last_member, minus any
  // exclusions that fall in the range
  const Index start = last_member + 1;
  const Index end = members == kUnbounded ? kUnbounded : v.member(members - 1) + 1;
  SeriesBound rest = family.power_sum_bounds(start, end, x, resolution_for(budget));
  if (!rest.diverges() && v.kind() == SupportSet::Kind::cofinite) {
    CompensatedSum excluded;
    for (Index e : v.indices()) {
      if (e >= start && e < end) excluded += std::pow(family.weight(e), x);
    }
    rest.lower = std::fmax(0.0, rest.lower - excluded.value() * (1.0 + kSumSlack));
  }
  return total + rest;
}

DimensionResult moran_root_finite(const WeightFamily& family, const SupportSet& v, double tol) {
  require_tolerance(tol);
  const SupportSet finite = restrict_to_alphabet(v, family);
  if (!finite.is_finite()) throw PreconditionError("moran_root_finite requires a finite support set");
  if (finite.indices().size() == 1) return point_result(0.0, Method::finite_root, 0);

  std::vector<double> q;
  q.reserve(finite.indices().size());
  for (Index i : finite.indices()) q.push_back(family.weight(i));
  std::size_t evaluations = 0;
  auto phi = [&](double x) {
    ++evaluations;
    CompensatedSum s;
    for (double w : q) s += std::pow(w, x);
    return s.value();
  };
  if (phi(1.0) >= 1.0) return point_result(1.0, Method::finite_root, evaluations);

  Bracket b{0.0, 1.0};
  while (b.hi - b.lo > tol) {
    const double mid = b.lo + 0.5 * (b.hi - b.lo);
    if (mid <= b.lo || mid >= b.hi) break;
    if (phi(mid) >= 1.0) {
      b.lo = mid;
    } else {
      b.hi = mid;
    }
  }
  return make_result(b, Method::finite_root, evaluations);
}

DimensionResult dim_sup(const WeightFamily& family, const SupportSet& v, double tol,
                        const BudgetSchedule& schedule) {
  require_tolerance(tol);
  const SupportSet support = restrict_to_alphabet(v, family);
  if (support.kind() == SupportSet::Kind::all) {
    // phi(1) = sum of a stochastic vector = 1
    return point_result(1.0, Method::sup, 0);
  }
  if (support.size() == Index{1}) return point_result(0.0, Method::sup, 0);

  Comparator cmp(family, support, kUnbounded, schedule);
  const auto at_one = cmp.at_least_one(1.0);
  if (!at_one) throw IndecisiveBoundError(1.0, cmp.last.lower, cmp.last.upper);
  if (*at_one) return point_result(1.0, Method::sup, cmp.evaluations);
  // phi(0) = |V| >= 1
  const Bracket b = bisect(cmp, {0.0, 1.0}, tol);
  return make_result(b, Method::sup, cmp.evaluations);
}

DimensionResult dim_root(const WeightFamily& family, const SupportSet& v, double tol,
                         const BudgetSchedule& schedule) {
  require_tolerance(tol);
  const SupportSet support = restrict_to_alphabet(v, family);
  if (support.is_finite()) {
    DimensionResult r = moran_root_finite(family, support, tol);
    r.method = Method::root;
    return r;
  }
  if (support.kind() == SupportSet::Kind::all) return point_result(1.0, Method::root, 0);

  Comparator cmp(family, support, kUnbounded, schedule);
  const auto at_one = cmp.at_least_one(1.0);
  if (!at_one) throw IndecisiveBoundError(1.0, cmp.last.lower, cmp.last.upper);
  if (*at_one) return point_result(1.0, Method::root, cmp.evaluations);

  // phi is infinite below the abscissa. If the series still converges at the
  // abscissa, phi jumps from +inf to phi(abscissa) and has a root only when
  // that value is at least 1.
  const Abscissa abscissa = family.abscissa();
  double lo = std::fmax(abscissa.x, 0.0);
  if (abscissa.converges_at && abscissa.x > 0.0) {
    const auto at_abscissa = cmp.at_least_one(abscissa.x);
    if (!at_abscissa) throw IndecisiveBoundError(abscissa.x, cmp.last.lower, cmp.last.upper);
    if (!*at_abscissa) {
      std::ostringstream msg;
      msg << "phi(x) = 1 has no root on [0,1]: the series diverges for x < " << abscissa.x
          << " and is below 1 from there on";
      throw NoRootError(msg.str());
    }
  }
  const Bracket b = bisect(cmp, {lo, 1.0}, tol);
  return make_result(b, Method::root, cmp.evaluations);
}

namespace {

DimensionResult limit_route(const WeightFamily& family, const SupportSet& support, double tol,
                            const LimitOptions& options, const DimensionResult& sup) {
  const double inner_tol = tol / 16.0;
  std::size_t evaluations = sup.evaluations;
  DimensionResult result;
  result.method = Method::limit;

  std::optional<Bracket> prev;
  double prev_value = 0.0;
  bool converged = false;
  for (Index k : truncation_schedule(options, options.k_max)) {
    Bracket b{0.0, 1.0};
    double value;
    if (k <= kExactTruncation) {
      const DimensionResult r = moran_root_finite(family, SupportSet::finite(support.first(k)), inner_tol);
      evaluations += r.evaluations;
      b = {r.lo, r.hi};
      value = r.value;
    } else {
      Comparator cmp(family, support, k, options.schedule);
      b = bisect(cmp, {prev ? prev->lo : 0.0, 1.0}, inner_tol);
      evaluations += cmp.evaluations;
      value = b.lo + 0.5 * (b.hi - b.lo);
    }
    result.sequence.emplace_back(k, value);
    const bool small_step = prev && value - prev_value < tol / 4.0;
    prev = b;
    prev_value = value;
    if (small_step && sup.hi - b.lo <= tol) {
      converged = true;
      break;
    }
  }
  result.value = prev_value;
  result.lo = prev->lo;
  result.hi = std::fmax(sup.hi, prev->hi);
  result.evaluations = evaluations;
  if (!converged) result.flags.emplace_back("SlowConvergence");
  return result;
}

}  // namespace

DimensionResult dim_limit(const WeightFamily& family, const SupportSet& v, double tol,
                          const LimitOptions& options) {
  require_tolerance(tol);
  if (options.k_max < 2) throw PreconditionError("dim_limit requires k_max >= 2");
  const SupportSet support = restrict_to_alphabet(v, family);
  if (support.is_finite()) {
    const Index n = *support.size();
    DimensionResult exact = moran_root_finite(family, support, tol);
    exact.method = Method::limit;
    if (n == 1) return exact;
    LimitOptions o = options;
    for (Index k : truncation_schedule(o, std::min(n, o.k_max))) {
      if (k == n) {
        exact.sequence.emplace_back(k, exact.value);
      } else {
        const auto r = moran_root_finite(family, SupportSet::finite(support.first(k)), tol);
        exact.evaluations += r.evaluations;
        exact.sequence.emplace_back(k, r.value);
      }
    }
    return exact;
  }
  const DimensionResult sup = dim_sup(family, support, tol, options.schedule);
  return limit_route(family, support, tol, options, sup);
}

DimensionResult dim_hausdorff(const WeightFamily& family, const SupportSet& v, double tol) {
  require_tolerance(tol);
  const SupportSet support = restrict_to_alphabet(v, family);
  if (support.is_finite()) return moran_root_finite(family, support, tol);

  DimensionResult sup = dim_sup(family, support, tol);
  if (support.kind() == SupportSet::Kind::all) return sup;
  const DimensionResult limit = limit_route(family, support, tol, LimitOptions{}, sup);
  if (limit.has_flag("SlowConvergence")) {
    sup.flags.emplace_back("LimitInconclusive");
  } else if (std::fabs(limit.value - sup.value) <= 2.0 * tol) {
    sup.flags.emplace_back("LimitAgrees");
  } else {
    sup.flags.emplace_back("RouteDisagreement");
  }
  return sup;
}

}  // namespace gls
