#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gls/dimension.hpp"
#include "gls/scheme.hpp"

namespace gls {

/// SplitMix64. Output is fully specified (no std:: distributions), so
/// samples are reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  static constexpr std::string_view kName = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Independent stream for point `index` of a run seeded with `seed`.
SplitMix64 point_stream(std::uint64_t seed, std::uint64_t index) noexcept;

/// Law (p_0, p_1, ...) of the i.i.d. digits of xi.
class DigitDistribution {
 public:
  /// Explicit (digit, probability) pairs; zero-probability digits are
  /// dropped from the support. Throws ConfigError("p") on negative or
  /// repeated entries, or a total differing from 1 by more than 1e-12.
  static DigitDistribution finite(std::vector<std::pair<Index, double>> masses);
  /// p_i proportional to q_i on V.
  static DigitDistribution proportional(const WeightFamily& family, const SupportSet& v);

  double mass(Index i) const;
  /// V = {i : p_i > 0}.
  const SupportSet& support() const noexcept { return support_; }

  /// Inverse CDF over the enumerated support, u in [0,1).
  Index sample(double u) const;

  /// Probability mass beyond the cached table that sampling assigns to the
  /// last cached digit. Below 1e-12 unless the cache cap was hit.
  double folded_mass() const noexcept { return folded_mass_; }

  /// Round-trips through parse_digit_distribution.
  std::string describe() const { return spec_; }

  static constexpr std::size_t kMaxCachedDigits = std::size_t{1} << 20;

 private:
  DigitDistribution(SupportSet support) : support_(std::move(support)) {}

  SupportSet support_;
  std::vector<Index> digits_;
  std::vector<double> cdf_;
  std::vector<double> masses_;
  double normalizer_ = 1.0;
  std::optional<WeightFamily> family_;
  double folded_mass_ = 0.0;
  std::string spec_;
};

struct SpectrumSample {
  std::vector<double> points;
  std::size_t digits_per_point = 0;
  std::uint64_t seed = 0;
};

/// decode of n digits drawn i.i.d. from p.
double sample_point(const GLSScheme& scheme, const DigitDistribution& p, std::size_t n,
                    SplitMix64& rng);

/// `count` points; point j uses point_stream(seed, j), so the result does
/// not depend on evaluation order.
SpectrumSample sample_spectrum(const GLSScheme& scheme, const DigitDistribution& p,
                               std::size_t n, std::size_t count, std::uint64_t seed);

/// Dimension of the spectrum S_xi, the closure of C[GLS, supp p].
DimensionResult spectrum_dimension(const GLSScheme& scheme, const DigitDistribution& p, double tol);

struct BoxCountResult {
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  double slope = 0.0;
  double r2 = 0.0;
};

/// Scales base^from, base^(from-1), ..., base^to (from > to, both <= 0).
std::vector<double> scale_ladder(double base, int from, int to);

/// Occupied bins floor(x / eps) per scale and the least-squares slope of
/// log N against log(1/eps). Scales must be positive and strictly
/// decreasing, at least two of them; with `resolution_floor` set, every
/// scale must be at least that large. Throws DegenerateFitError when all
/// points share one bin at the coarsest scale.
BoxCountResult box_count(const std::vector<double>& points, const std::vector<double>& scales,
                         std::optional<double> resolution_floor = std::nullopt);

/// F on the uniform grid j/(grid-1), j = 0..grid-1.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> points, std::size_t grid);

}  // namespace gls
