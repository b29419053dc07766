#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gls/dimension.hpp"
#include "gls/measure.hpp"
#include "gls/scheme.hpp"

namespace gls {

/// Scheme configuration:
///   {"weights": {"kind": ..., "ratio": r, "values": [...], "tail_ratio": t},
///    "placement": {"order": "ascending"|"permuted", "prefix": [...]}}
/// Unknown keys and misplaced parameters are rejected with a ConfigError
/// naming the dotted path. `checked = false` skips the explicit-mass check.
GLSScheme scheme_from_json(const nlohmann::json& config, bool checked = true);
GLSScheme load_scheme(const std::filesystem::path& path, bool checked = true);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// "all", "exclude:0,5" or "only:0,2,7".
SupportSet parse_support(std::string_view spec);

/// "0:0.5,2:0.5" or "proportional:<V spec>".
DigitDistribution parse_digit_distribution(std::string_view spec, const WeightFamily& family);

/// "3^-2..3^-8" (base^from..base^to) or a comma list of positive numbers.
std::vector<double> parse_scales(std::string_view spec);

/// "1,0,0".
DigitString parse_digits(std::string_view spec);
std::string format_digits(const DigitString& d);

/// Shortest %g rendering with `digits` significant digits.
std::string format_real(double v, int digits);

nlohmann::json to_json(const DimensionResult& r);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const BoxCountResult& r);

}  // namespace gls
