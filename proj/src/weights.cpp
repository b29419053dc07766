#include "gls/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gls/errors.hpp"

namespace gls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundSlack = 4.0 * kSumSlack;
constexpr double kPhi = std::numbers::phi;
// Ranges shorter than this are summed term by term.
constexpr Index kDirectTerms = 256;

// loglog normalization: this many terms are summed before the tail estimate.
constexpr Index kLogLogTerms = 1'000'000;
// Cumulative sums are tabulated for the first kLogLogCache indices.
constexpr Index kLogLogCache = Index{1} << 16;

bool is_unbounded(Index last) { return last == kUnbounded; }

// f(n) = 1 / (n ln^2 n)
double loglog_term(double n) {
  const double l = std::log(n);
  return 1.0 / (n * l * l);
}

// Euler-Maclaurin estimate of sum_{n>=m} f(n): integral, half first term,
// first derivative correction. Remainder is of order f'''(m), below 1e-19
// for m > 6e4.
double loglog_tail_estimate(double m) {
  const double l = std::log(m);
  return 1.0 / l + 0.5 * loglog_term(m) + (l + 2.0) / (12.0 * m * m * l * l * l);
}

// int_{u0}^{u1} u^(s-1) du, u1 may be +inf.
double power_integral(double u0, double u1, double s) {
  if (std::isinf(u1)) {
    return s < 0.0 ? std::pow(u0, s) / -s : kInf;
  }
  const double log_ratio = std::log1p((u1 - u0) / u0);
  if (s == 0.0) return log_ratio;
  return std::pow(u0, s) * std::expm1(s * log_ratio) / s;
}

// Subnormal results carry no relative accuracy; any value below the
// smallest normal double is bounded by it.
SeriesBound absorb_underflow(SeriesBound b) {
  if (b.diverges()) return b;
  if (b.lower < std::numeric_limits<double>::min()) b.lower = 0.0;
  if (b.upper < std::numeric_limits<double>::min()) b.upper = std::numeric_limits<double>::min();
  return b;
}

// exp(arg) inherits a relative error of about |arg| ulps from arg.
double exp_slack(double arg) { return 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(arg) + 1.0); }

// first + first*rho + ... (count terms, count may be unbounded), with
// log_rho = ln(rho) < 0.
double geometric_sum(double first, double log_rho, Index count) {
  const double denom = -std::expm1(log_rho);
  if (is_unbounded(count)) return first / denom;
  return first * (-std::expm1(static_cast<double>(count) * log_rho)) / denom;
}

// Bracket on int_{u0}^{u1} h(u) du for convex h by the midpoint (below) and
// trapezoid (above) rules with n panels.
template <typename H>
SeriesBound convex_quadrature(H h, double u0, double u1, std::size_t n) {
  const double w = (u1 - u0) / static_cast<double>(n);
  CompensatedSum mid, trap;
  trap += 0.5 * (h(u0) + h(u1));
  for (std::size_t j = 0; j < n; ++j) {
    mid += h(u0 + (static_cast<double>(j) + 0.5) * w);
    if (j > 0) trap += h(u0 + static_cast<double>(j) * w);
  }
  return {mid.value() * w, trap.value() * w};
}

// Largest i in [0, kMaxDigit] with cum(i) <= r for a nondecreasing cum with
// cum(0) = 0 <= r, starting the search at `guess`.
template <typename Cum>
Index gallop_locate(Cum cum, double r, Index guess) {
  constexpr Index kMax = WeightFamily::kMaxDigit;
  guess = std::min(guess, kMax);
  Index lo, hi;
  if (cum(guess) <= r) {
    lo = guess;
    Index step = 1;
    for (;;) {
      if (lo >= kMax) throw DigitOverflowError(0);
      const Index probe = (kMax - lo > step) ? lo + step : kMax;
      if (cum(probe) > r) {
        hi = probe;
        break;
      }
      lo = probe;
      step *= 2;
    }
  } else {
    hi = guess;
    Index step = 1;
    for (;;) {
      const Index probe = hi > step ? hi - step : 0;
      if (cum(probe) <= r) {
        lo = probe;
        break;
      }
      hi = probe;
      step *= 2;
    }
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (cum(mid) <= r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Index guess_from(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= static_cast<double>(WeightFamily::kMaxDigit)) return WeightFamily::kMaxDigit;
  return static_cast<Index>(v);
}

struct LogLogTables {
  double constant;
  double constant_width;
  std::shared_ptr<const std::vector<double>> cumulative;
};

const LogLogTables& loglog_tables() {
  static const LogLogTables tables = [] {
    CompensatedSum head;
    for (Index n = 2; n < kLogLogTerms + 2; ++n) head += loglog_term(static_cast<double>(n));
    const double k = static_cast<double>(kLogLogTerms + 2);
    const double s = head.value();
    const double constant = 1.0 / (s + loglog_tail_estimate(k));
    // integral test: 1/ln K <= tail <= 1/ln K + f(K)
    const double a_hi = 1.0 / (s + 1.0 / std::log(k));
    const double a_lo = 1.0 / (s + 1.0 / std::log(k) + loglog_term(k));

    auto cum = std::make_shared<std::vector<double>>();
    cum->reserve(kLogLogCache + 1);
    CompensatedSum run;
    cum->push_back(0.0);
    for (Index i = 0; i < kLogLogCache; ++i) {
      run += constant * loglog_term(static_cast<double>(i + 2));
      cum->push_back(run.value());
    }
    return LogLogTables{constant, a_hi - a_lo, std::move(cum)};
  }();
  return tables;
}

void require_exponent(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw PreconditionError("power-sum exponent must lie in [0,1]");
  }
}

}  // namespace

std::string_view to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::luroth: return "luroth";
    case FamilyKind::geometric: return "geometric";
    case FamilyKind::golden: return "golden";
    case FamilyKind::loglog: return "loglog";
    case FamilyKind::explicit_list: return "explicit";
  }
  return "unknown";
}

WeightFamily WeightFamily::luroth() { return WeightFamily(detail::Luroth{}); }

WeightFamily WeightFamily::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("ratio", "geometric ratio must lie in (0,1)");
  }
  return WeightFamily(detail::Geometric{ratio});
}

WeightFamily WeightFamily::golden() { return WeightFamily(detail::Golden{}); }

WeightFamily WeightFamily::loglog() {
  const auto& t = loglog_tables();
  return WeightFamily(detail::LogLog{t.constant, t.constant_width, t.cumulative});
}

WeightFamily WeightFamily::explicit_weights(std::vector<double> values,
                                            std::optional<double> tail_ratio,
                                            bool checked) {
  if (values.empty()) throw ConfigError("values", "explicit weight list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(std::isfinite(values[i]) && values[i] > 0.0)) {
      throw ConfigError("values", "weight " + std::to_string(i) + " must be positive");
    }
  }
  if (tail_ratio && !(*tail_ratio > 0.0 && *tail_ratio < 1.0)) {
    throw ConfigError("tail_ratio", "tail ratio must lie in (0,1)");
  }
  std::vector<double> prefix;
  prefix.reserve(values.size() + 1);
  CompensatedSum run;
  prefix.push_back(0.0);
  for (double v : values) {
    run += v;
    prefix.push_back(run.value());
  }
  const double mass = run.value();
  const double tail_mass = tail_ratio ? 1.0 - mass : 0.0;
  if (checked) {
    if (tail_ratio && !(tail_mass > 0.0)) {
      std::ostringstream msg;
      msg << "explicit weights sum to " << mass << ", leaving no mass for the tail";
      throw NormalizationError(mass, msg.str());
    }
    if (!tail_ratio && std::fabs(mass - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "explicit weights sum to " << mass << " instead of 1";
      throw NormalizationError(mass, msg.str());
    }
  }
  return WeightFamily(detail::Explicit{std::move(values), std::move(prefix), tail_ratio, tail_mass});
}

FamilyKind WeightFamily::kind() const noexcept {
  return static_cast<FamilyKind>(data_.index());
}

std::string WeightFamily::describe() const {
  std::ostringstream out;
  out << to_string(kind());
  if (const auto* g = std::get_if<detail::Geometric>(&data_)) {
    out << "(" << g->ratio << ")";
  } else if (const auto* e = std::get_if<detail::Explicit>(&data_)) {
    out << "(" << e->values.size() << " values";
    if (e->tail_ratio) out << ", tail " << *e->tail_ratio;
    out << ")";
  }
  return out.str();
}

double WeightFamily::weight(Index i) const {
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        const double di = static_cast<double>(i);
        if constexpr (std::is_same_v<T, detail::Luroth>) {
          return 1.0 / ((di + 1.0) * (di + 2.0));
        } else if constexpr (std::is_same_v<T, detail::Geometric>) {
          return (1.0 - d.ratio) * std::pow(d.ratio, di);
        } else if constexpr (std::is_same_v<T, detail::Golden>) {
          return std::pow(kPhi, -(di + 2.0));
        } else if constexpr (std::is_same_v<T, detail::LogLog>) {
          return d.constant * loglog_term(di + 2.0);
        } else {
          const Index m = d.values.size();
          if (i < m) return d.values[i];
          if (!d.tail_ratio) throw PreconditionError("digit outside the finite alphabet");
          return d.tail_mass * (1.0 - *d.tail_ratio) *
                 std::pow(*d.tail_ratio, static_cast<double>(i - m));
        }
      },
      data_);
}

double WeightFamily::cumulative(Index i) const {
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        const double di = static_cast<double>(i);
        if constexpr (std::is_same_v<T, detail::Luroth>) {
          return 1.0 - 1.0 / (di + 1.0);
        } else if constexpr (std::is_same_v<T, detail::Geometric>) {
          return -std::expm1(di * std::log(d.ratio));
        } else if constexpr (std::is_same_v<T, detail::Golden>) {
          return -std::expm1(-di * std::log(kPhi));
        } else if constexpr (std::is_same_v<T, detail::LogLog>) {
          const auto& c = *d.cumulative;
          if (i < c.size()) return c[i];
          const double k = static_cast<double>(c.size() - 1);
          return c.back() + d.constant * (loglog_tail_estimate(k + 2.0) -
                                          loglog_tail_estimate(di + 2.0));
        } else {
          const Index m = d.values.size();
          if (i <= m) return d.prefix[i];
          if (!d.tail_ratio) return d.prefix[m];
          return d.prefix[m] +
                 d.tail_mass * -std::expm1(static_cast<double>(i - m) * std::log(*d.tail_ratio));
        }
      },
      data_);
}

double WeightFamily::tail_sum_from(Index k) const {
  return std::visit(
      [k](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        const double dk = static_cast<double>(k);
        if constexpr (std::is_same_v<T, detail::Luroth>) {
          return 1.0 / (dk + 1.0);
        } else if constexpr (std::is_same_v<T, detail::Geometric>) {
          return std::pow(d.ratio, dk);
        } else if constexpr (std::is_same_v<T, detail::Golden>) {
          return std::pow(kPhi, -dk);
        } else if constexpr (std::is_same_v<T, detail::LogLog>) {
          const auto& c = *d.cumulative;
          if (k < c.size()) return 1.0 - c[k];
          return d.constant * loglog_tail_estimate(dk + 2.0);
        } else {
          const Index m = d.values.size();
          if (k < m) return (d.prefix[m] - d.prefix[k]) + d.tail_mass;
          if (!d.tail_ratio) return 0.0;
          return d.tail_mass * std::pow(*d.tail_ratio, static_cast<double>(k - m));
        }
      },
      data_);
}

SeriesBound WeightFamily::tail_power_bounds(Index k, double x) const {
  return power_sum_bounds(k, kUnbounded, x);
}

SeriesBound WeightFamily::power_sum_bounds(Index first, Index last, double x,
                                           std::size_t resolution) const {
  require_exponent(x);
  if (const auto m = alphabet_size()) last = std::min(last, *m);
  if (first >= last) return SeriesBound::exact(0.0);
  const bool unbounded = is_unbounded(last);
  if (x == 0.0) {
    if (unbounded) return SeriesBound::divergent();
    return SeriesBound::exact(static_cast<double>(last - first));
  }
  if (!unbounded && last - first <= kDirectTerms) {
    CompensatedSum s;
    double worst = 0.0;
    for (Index i = first; i < last; ++i) {
      const double arg = x * log_weight(i);
      worst = std::max(worst, std::fabs(arg));
      s += std::exp(arg);
    }
    return absorb_underflow(widen(SeriesBound::exact(s.value()), kBoundSlack + exp_slack(worst)));
  }
  const Index count = unbounded ? kUnbounded : last - first;
  const double a = static_cast<double>(first);
  const double b = unbounded ? kInf : static_cast<double>(last);

  SeriesBound raw = std::visit(
      [&](const auto& d) -> SeriesBound {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::Luroth>) {
          if (x == 1.0) {
            const double v = 1.0 / (a + 1.0) - (unbounded ? 0.0 : 1.0 / (b + 1.0));
            return SeriesBound::exact(v);
          }
          // (t+1)(t+2) = (t+1.5)^2 - 1/4, so g(t) = (t+1.5)^(-2x) satisfies
          // g <= q_t^x <= c_a g on [a, inf). g is convex and decreasing.
          const double s = 1.0 - 2.0 * x;
          if (unbounded && s >= 0.0) return SeriesBound::divergent();
          auto g = [x](double t) { return std::pow(t + 1.5, -2.0 * x); };
          const double g_end = unbounded ? 0.0 : g(b);
          const double lower = power_integral(a + 1.5, b + 1.5, s) + 0.5 * (g(a) - g_end);
          const double shift = 1.0 / (4.0 * (a + 1.5) * (a + 1.5));
          const double c_a = std::exp(-x * std::log1p(-shift));
          const double upper = c_a * power_integral(a + 1.0, b + 1.0, s);
          return {lower, upper};
        } else if constexpr (std::is_same_v<T, detail::Geometric>) {
          const double arg = x * (std::log1p(-d.ratio) + a * std::log(d.ratio));
          return widen(SeriesBound::exact(geometric_sum(std::exp(arg), x * std::log(d.ratio), count)),
                       exp_slack(arg));
        } else if constexpr (std::is_same_v<T, detail::Golden>) {
          const double log_rho = -x * std::log(kPhi);
          const double arg = (a + 2.0) * log_rho;
          return widen(SeriesBound::exact(geometric_sum(std::exp(arg), log_rho, count)), exp_slack(arg));
        } else if constexpr (std::is_same_v<T, detail::LogLog>) {
          // q_i^x = A^x g(i+2) with g(t) = t^-x ln^-2x t convex decreasing on
          // t > 1. Sum over n in [alpha, beta):
          //   int_alpha^beta g + (g(alpha) - g(beta))/2 <= sum <= int_{alpha-1/2}^{beta-1/2} g
          // and int g dt = int e^{(1-x)u} u^{-2x} du (u = ln t), whose
          // integrand is log-convex.
          const double scale = std::pow(d.constant, x);
          const double alpha = a + 2.0;
          const double beta = b + 2.0;
          auto g = [x](double t) { return std::pow(t, -x) * std::pow(std::log(t), -2.0 * x); };
          if (x == 1.0) {
            auto integral = [](double t0, double t1) {
              return 1.0 / std::log(t0) - (std::isinf(t1) ? 0.0 : 1.0 / std::log(t1));
            };
            const double g_end = unbounded ? 0.0 : g(beta);
            return {scale * (integral(alpha, beta) + 0.5 * (g(alpha) - g_end)),
                    scale * integral(alpha - 0.5, beta - 0.5)};
          }
          if (unbounded) return SeriesBound::divergent();
          const double c = 1.0 - x;
          auto h = [c, x](double u) { return std::exp(c * u - 2.0 * x * std::log(u)); };
          const std::size_t panels = std::max<std::size_t>(resolution, 16);
          const SeriesBound inner =
              convex_quadrature(h, std::log(alpha), std::log(beta), panels);
          const SeriesBound outer =
              convex_quadrature(h, std::log(alpha - 0.5), std::log(beta - 0.5), panels);
          return {scale * (inner.lower + 0.5 * (g(alpha) - g(beta))), scale * outer.upper};
        } else {
          const Index m = d.values.size();
          CompensatedSum head;
          for (Index i = first; i < std::min<Index>(last, m); ++i) head += std::pow(d.values[i], x);
          double tail = 0.0;
          double slack = 0.0;
          if (d.tail_ratio && last > m) {
            const Index j0 = first > m ? first - m : 0;
            const Index tail_count = unbounded ? kUnbounded : last - m - j0;
            const double log_t = std::log(*d.tail_ratio);
            const double arg =
                x * (std::log(d.tail_mass * (1.0 - *d.tail_ratio)) + static_cast<double>(j0) * log_t);
            tail = geometric_sum(std::exp(arg), x * log_t, tail_count);
            slack = exp_slack(arg);
          }
          return widen(SeriesBound::exact(head.value() + tail), slack);
        }
      },
      data_);
  if (raw.diverges()) return raw;
  raw.lower = std::fmax(0.0, raw.lower);
  return absorb_underflow(widen(raw, kBoundSlack));
}

double WeightFamily::log_weight(Index i) const {
  const double di = static_cast<double>(i);
  if (const auto* g = std::get_if<detail::Geometric>(&data_)) {
    return std::log1p(-g->ratio) + di * std::log(g->ratio);
  }
  if (std::holds_alternative<detail::Golden>(data_)) return -(di + 2.0) * std::log(kPhi);
  if (const auto* e = std::get_if<detail::Explicit>(&data_); e && i >= e->values.size() && e->tail_ratio) {
    return std::log(e->tail_mass * (1.0 - *e->tail_ratio)) +
           static_cast<double>(i - e->values.size()) * std::log(*e->tail_ratio);
  }
  return std::log(weight(i));
}

double WeightFamily::q_max() const {
  return std::visit(
      [this](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::Explicit>) {
          double best = *std::max_element(d.values.begin(), d.values.end());
          if (d.tail_ratio) best = std::max(best, d.tail_mass * (1.0 - *d.tail_ratio));
          return best;
        } else {
          // weights of the closed-form families decrease in i
          return weight(0);
        }
      },
      data_);
}

std::optional<Index> WeightFamily::alphabet_size() const {
  if (const auto* e = std::get_if<detail::Explicit>(&data_)) {
    if (!e->tail_ratio) return e->values.size();
  }
  return std::nullopt;
}

Abscissa WeightFamily::abscissa() const {
  switch (kind()) {
    case FamilyKind::luroth: return {0.5, false};
    case FamilyKind::loglog: return {1.0, true};
    case FamilyKind::explicit_list:
      if (alphabet_size()) return {-kInf, true};
      return {0.0, false};
    default: return {0.0, false};
  }
}

std::optional<Index> WeightFamily::locate(double r) const {
  if (const auto m = alphabet_size()) {
    const auto& prefix = std::get<detail::Explicit>(data_).prefix;
    // last cylinder is closed on the right
    if (r >= prefix[*m - 1]) return *m - 1;
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), r);
    return static_cast<Index>(it - prefix.begin()) - 1;
  }
  if (!(r < 1.0)) return std::nullopt;
  if (r <= 0.0) return 0;
  auto cum = [this](Index i) { return cumulative(i); };
  return std::visit(
      [&](const auto& d) -> Index {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::Luroth>) {
          return gallop_locate(cum, r, guess_from(1.0 / (1.0 - r) - 1.0));
        } else if constexpr (std::is_same_v<T, detail::Geometric>) {
          return gallop_locate(cum, r, guess_from(std::log1p(-r) / std::log(d.ratio)));
        } else if constexpr (std::is_same_v<T, detail::Golden>) {
          return gallop_locate(cum, r, guess_from(std::log1p(-r) / -std::log(kPhi)));
        } else if constexpr (std::is_same_v<T, detail::LogLog>) {
          const auto& c = *d.cumulative;
          if (r < c.back()) {
            const auto it = std::upper_bound(c.begin(), c.end(), r);
            return static_cast<Index>(it - c.begin()) - 1;
          }
          // A / ln(i+2) approximates the tail mass 1 - r
          return gallop_locate(cum, r, guess_from(std::exp(std::fmin(d.constant / (1.0 - r), 700.0))));
        } else {
          const Index m = d.values.size();
          if (r < d.prefix[m]) {
            const auto it = std::upper_bound(d.prefix.begin(), d.prefix.end(), r);
            return static_cast<Index>(it - d.prefix.begin()) - 1;
          }
          const double frac = (r - d.prefix[m]) / d.tail_mass;
          const double j = frac < 1.0 ? std::log1p(-frac) / std::log(*d.tail_ratio)
                                      : static_cast<double>(kMaxDigit);
          return gallop_locate(cum, r, guess_from(static_cast<double>(m) + j));
        }
      },
      data_);
}

double WeightFamily::ratio() const {
  if (const auto* g = std::get_if<detail::Geometric>(&data_)) return g->ratio;
  throw PreconditionError("ratio() requires a geometric family");
}

const std::vector<double>& WeightFamily::explicit_values() const {
  if (const auto* e = std::get_if<detail::Explicit>(&data_)) return e->values;
  throw PreconditionError("explicit_values() requires an explicit family");
}

std::optional<double> WeightFamily::tail_ratio() const {
  if (const auto* e = std::get_if<detail::Explicit>(&data_)) return e->tail_ratio;
  throw PreconditionError("tail_ratio() requires an explicit family");
}

double WeightFamily::loglog_constant() const {
  if (const auto* l = std::get_if<detail::LogLog>(&data_)) return l->constant;
  throw PreconditionError("loglog_constant() requires the loglog family");
}

double WeightFamily::loglog_constant_width() const {
  if (const auto* l = std::get_if<detail::LogLog>(&data_)) return l->constant_width;
  throw PreconditionError("loglog_constant_width() requires the loglog family");
}

}  // namespace gls
