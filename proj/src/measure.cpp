#include "gls/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gls/errors.hpp"

namespace gls {

namespace {

constexpr double kMassTolerance = 1e-12;

std::string format_mass(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

SplitMix64 point_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  SplitMix64 mix(index);
  return SplitMix64(seed ^ mix.next());
}

DigitDistribution DigitDistribution::finite(std::vector<std::pair<Index, double>> masses) {
  if (masses.empty()) throw ConfigError("p", "digit distribution is empty");
  std::sort(masses.begin(), masses.end());
  CompensatedSum total;
  std::vector<Index> support;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    const auto [digit, p] = masses[j];
    if (j > 0 && masses[j - 1].first == digit) {
      throw ConfigError("p", "digit " + std::to_string(digit) + " listed twice");
    }
    if (!(std::isfinite(p) && p >= 0.0)) {
      throw ConfigError("p", "probability of digit " + std::to_string(digit) + " must be >= 0");
    }
    total += p;
    if (p > 0.0) support.push_back(digit);
  }
  if (std::fabs(total.value() - 1.0) > kMassTolerance) {
    throw ConfigError("p", "probabilities sum to " + format_mass(total.value()) + " instead of 1");
  }
  if (support.empty()) throw ConfigError("p", "no digit has positive probability");

  DigitDistribution d(SupportSet::finite(support));
  CompensatedSum run;
  std::ostringstream spec;
  bool first = true;
  for (const auto& [digit, p] : masses) {
    spec << (first ? "" : ",") << digit << ":" << format_mass(p);
    first = false;
    if (p == 0.0) continue;
    run += p;
    d.digits_.push_back(digit);
    d.masses_.push_back(p);
    d.cdf_.push_back(run.value());
  }
  d.cdf_.back() = 1.0;
  d.spec_ = spec.str();
  return d;
}

DigitDistribution DigitDistribution::proportional(const WeightFamily& family, const SupportSet& v) {
  const SupportSet support = restrict_to_alphabet(v, family);
  DigitDistribution d(support);
  d.family_ = family;
  d.spec_ = "proportional:" + v.describe();

  CompensatedSum z;
  switch (support.kind()) {
    case SupportSet::Kind::all: z += 1.0; break;
    case SupportSet::Kind::finite:
      for (Index i : support.indices()) z += family.weight(i);
      break;
    case SupportSet::Kind::cofinite:
      z += 1.0;
      for (Index e : support.indices()) z += -family.weight(e);
      break;
  }
  d.normalizer_ = z.value();

  CompensatedSum run;
  auto excluded = support.indices().begin();
  const auto& listed = support.indices();
  const std::size_t limit = support.size().value_or(kMaxCachedDigits);
  for (Index ordinal = 0, i = 0; ordinal < limit; ++i) {
    Index digit = i;
    if (support.is_finite()) {
      digit = listed[ordinal];
    } else if (support.kind() == SupportSet::Kind::cofinite) {
      while (excluded != listed.end() && *excluded < i) ++excluded;
      if (excluded != listed.end() && *excluded == i) continue;
    }
    const double p = family.weight(digit) / d.normalizer_;
    run += p;
    d.digits_.push_back(digit);
    d.masses_.push_back(p);
    d.cdf_.push_back(run.value());
    ++ordinal;
    if (run.value() >= 1.0 - kMassTolerance) break;
  }
  d.folded_mass_ = std::fmax(0.0, 1.0 - run.value());
  d.cdf_.back() = 1.0;
  return d;
}

double DigitDistribution::mass(Index i) const {
  if (!support_.contains(i)) return 0.0;
  if (family_) return family_->weight(i) / normalizer_;
  const auto it = std::lower_bound(digits_.begin(), digits_.end(), i);
  return it != digits_.end() && *it == i ? masses_[static_cast<std::size_t>(it - digits_.begin())] : 0.0;
}

Index DigitDistribution::sample(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto j = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  return digits_[j];
}

double sample_point(const GLSScheme& scheme, const DigitDistribution& p, std::size_t n,
                    SplitMix64& rng) {
  if (n == 0) throw PreconditionError("sampling rank must be at least 1");
  DigitString d;
  d.digits.reserve(n);
  for (std::size_t k = 0; k < n; ++k) d.digits.push_back(p.sample(rng.uniform()));
  return decode(scheme, d);
}

SpectrumSample sample_spectrum(const GLSScheme& scheme, const DigitDistribution& p,
                               std::size_t n, std::size_t count, std::uint64_t seed) {
  SpectrumSample s;
  s.digits_per_point = n;
  s.seed = seed;
  s.points.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    SplitMix64 rng = point_stream(seed, j);
    s.points.push_back(sample_point(scheme, p, n, rng));
  }
  return s;
}

DimensionResult spectrum_dimension(const GLSScheme& scheme, const DigitDistribution& p, double tol) {
  if (!scheme.delta_infinity_countable()) {
    throw UnsupportedSchemeError("spectrum dimension needs an at most countable Delta_infinity");
  }
  return dim_hausdorff(scheme.weights(), p.support(), tol);
}

std::vector<double> scale_ladder(double base, int from, int to) {
  if (!(base > 1.0)) throw PreconditionError("scale base must exceed 1");
  if (from > 0 || to >= from) throw PreconditionError("scale exponents must satisfy 0 >= from > to");
  std::vector<double> scales;
  for (int e = from; e >= to; --e) scales.push_back(std::pow(base, e));
  return scales;
}

BoxCountResult box_count(const std::vector<double>& points, const std::vector<double>& scales,
                         std::optional<double> resolution_floor) {
  if (points.empty()) throw PreconditionError("box counting needs at least one point");
  if (scales.size() < 2) throw PreconditionError("box counting needs at least two scales");
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (!(scales[j] > 0.0)) throw PreconditionError("scales must be positive");
    if (j > 0 && !(scales[j] < scales[j - 1])) {
      throw PreconditionError("scales must be strictly decreasing");
    }
  }
  if (resolution_floor && scales.back() < *resolution_floor) {
    throw PreconditionError("finest scale lies below the sampling resolution floor");
  }

  BoxCountResult r;
  r.scales = scales;
  std::vector<long long> bins(points.size());
  for (double eps : scales) {
    std::transform(points.begin(), points.end(), bins.begin(),
                   [eps](double x) { return static_cast<long long>(std::floor(x / eps)); });
    std::sort(bins.begin(), bins.end());
    r.counts.push_back(static_cast<std::size_t>(std::unique(bins.begin(), bins.end()) - bins.begin()));
  }
  if (r.counts.front() == 1) {
    throw DegenerateFitError("all points fall into one box at the coarsest scale");
  }

  // ordinary least squares of log N on log(1/eps)
  const double n = static_cast<double>(scales.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    xs.push_back(-std::log(scales[j]));
    ys.push_back(std::log(static_cast<double>(r.counts[j])));
    mx += xs.back();
    my += ys.back();
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  r.slope = sxy / sxx;
  // a flat count profile is fitted exactly by slope 0
  r.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return r;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> points, std::size_t grid) {
  if (points.empty()) throw PreconditionError("empirical CDF needs at least one point");
  if (grid < 2) throw PreconditionError("CDF grid needs at least two nodes");
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double x = j + 1 == grid ? 1.0 : static_cast<double>(j) / static_cast<double>(grid - 1);
    const auto below = std::upper_bound(points.begin(), points.end(), x) - points.begin();
    out.emplace_back(x, static_cast<double>(below) / n);
  }
  return out;
}

}  // namespace gls
