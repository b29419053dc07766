#include "gls/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "gls/errors.hpp"

namespace gls {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) throw ConfigError(path + "." + key, "unknown key");
  }
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing");
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

void forbid(const json& obj, const std::string& key, const std::string& path, const std::string& why) {
  if (obj.contains(key)) throw ConfigError(path + "." + key, why);
}

WeightFamily family_from_json(const json& w, bool checked) {
  const std::string path = "weights";
  reject_unknown(w, path, {"kind", "ratio", "values", "tail_ratio"});
  const std::string kind = string_at(w, "kind", path);
  if (kind != "geometric") forbid(w, "ratio", path, "only valid for kind geometric");
  if (kind != "explicit") {
    forbid(w, "values", path, "only valid for kind explicit");
    forbid(w, "tail_ratio", path, "only valid for kind explicit");
  }
  try {
    if (kind == "luroth") return WeightFamily::luroth();
    if (kind == "golden") return WeightFamily::golden();
    if (kind == "loglog") return WeightFamily::loglog();
    if (kind == "geometric") return WeightFamily::geometric(number_at(w, "ratio", path));
    if (kind == "explicit") {
      if (!w.contains("values") || !w.at("values").is_array()) {
        throw ConfigError(path + ".values", "expected an array of numbers");
      }
      std::vector<double> values;
      for (const auto& v : w.at("values")) {
        if (!v.is_number()) throw ConfigError(path + ".values", "expected an array of numbers");
        values.push_back(v.get<double>());
      }
      std::optional<double> tail;
      if (w.contains("tail_ratio")) tail = number_at(w, "tail_ratio", path);
      return WeightFamily::explicit_weights(std::move(values), tail, checked);
    }
  } catch (const ConfigError& e) {
    if (e.field().rfind(path, 0) == 0) throw;
    throw ConfigError(path + "." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  throw ConfigError(path + ".kind", "unknown weight family '" + kind + "'");
}

Placement placement_from_json(const json& p) {
  const std::string path = "placement";
  reject_unknown(p, path, {"order", "prefix"});
  const std::string order = string_at(p, "order", path);
  if (order == "ascending") {
    forbid(p, "prefix", path, "only valid for order permuted");
    return Placement::ascending();
  }
  if (order != "permuted") throw ConfigError(path + ".order", "expected 'ascending' or 'permuted'");
  if (!p.contains("prefix") || !p.at("prefix").is_array() || p.at("prefix").empty()) {
    throw ConfigError(path + ".prefix", "expected a nonempty array of indices");
  }
  std::vector<Index> prefix;
  for (const auto& v : p.at("prefix")) {
    if (!v.is_number_unsigned()) throw ConfigError(path + ".prefix", "expected nonnegative integers");
    prefix.push_back(v.get<Index>());
  }
  return Placement::permuted(std::move(prefix));
}

Index parse_index(std::string_view s, const char* field) {
  Index v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ConfigError(field, "'" + std::string(s) + "' is not a nonnegative integer");
  }
  return v;
}

double parse_double(std::string_view s, const char* field) {
  const std::string text(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) throw ConfigError(field, "'" + text + "' is not a number");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<Index> parse_index_list(std::string_view s, const char* field) {
  std::vector<Index> out;
  for (auto part : split(s, ',')) out.push_back(parse_index(part, field));
  return out;
}

}  // namespace

GLSScheme scheme_from_json(const json& config, bool checked) {
  reject_unknown(config, "scheme", {"weights", "placement"});
  if (!config.contains("weights")) throw ConfigError("weights", "missing");
  WeightFamily family = family_from_json(config.at("weights"), checked);
  Placement placement = config.contains("placement") ? placement_from_json(config.at("placement"))
                                                     : Placement::ascending();
  return GLSScheme(std::move(family), std::move(placement));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scheme", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scheme", path.string() + ": " + e.what());
  }
}

GLSScheme load_scheme(const std::filesystem::path& path, bool checked) {
  return scheme_from_json(read_json_file(path), checked);
}

SupportSet parse_support(std::string_view spec) {
  if (spec == "all") return SupportSet::all();
  if (spec.rfind("exclude:", 0) == 0) return SupportSet::cofinite(parse_index_list(spec.substr(8), "V"));
  if (spec.rfind("only:", 0) == 0) return SupportSet::finite(parse_index_list(spec.substr(5), "V"));
  throw ConfigError("V", "expected 'all', 'exclude:<list>' or 'only:<list>'");
}

DigitDistribution parse_digit_distribution(std::string_view spec, const WeightFamily& family) {
  if (spec.rfind("proportional:", 0) == 0) {
    return DigitDistribution::proportional(family, parse_support(spec.substr(13)));
  }
  std::vector<std::pair<Index, double>> masses;
  for (auto entry : split(spec, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos) throw ConfigError("p", "expected digit:probability pairs");
    masses.emplace_back(parse_index(entry.substr(0, colon), "p"), parse_double(entry.substr(colon + 1), "p"));
  }
  return DigitDistribution::finite(std::move(masses));
}

std::vector<double> parse_scales(std::string_view spec) {
  const auto dots = spec.find("..");
  if (dots != std::string_view::npos) {
    auto power = [](std::string_view s, double* base) {
      const auto caret = s.find('^');
      if (caret == std::string_view::npos) throw ConfigError("scales", "expected base^exponent");
      *base = parse_double(s.substr(0, caret), "scales");
      const double e = parse_double(s.substr(caret + 1), "scales");
      if (e != std::floor(e)) throw ConfigError("scales", "exponents must be integers");
      return static_cast<int>(e);
    };
    double b0 = 0.0, b1 = 0.0;
    const int from = power(spec.substr(0, dots), &b0);
    const int to = power(spec.substr(dots + 2), &b1);
    if (b0 != b1) throw ConfigError("scales", "both ends must use the same base");
    try {
      return scale_ladder(b0, from, to);
    } catch (const PreconditionError& e) {
      throw ConfigError("scales", e.what());
    }
  }
  std::vector<double> out;
  for (auto part : split(spec, ',')) out.push_back(parse_double(part, "scales"));
  return out;
}

DigitString parse_digits(std::string_view spec) {
  DigitString d;
  d.digits = parse_index_list(spec, "digits");
  return d;
}

std::string format_digits(const DigitString& d) {
  std::string out;
  for (std::size_t k = 0; k < d.digits.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(d.digits[k]);
  }
  return out;
}

std::string format_real(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json to_json(const DimensionResult& r) {
  return {{"value", r.value},
          {"method", std::string(to_string(r.method))},
          {"bracket", {r.lo, r.hi}},
          {"evaluations", r.evaluations},
          {"flags", r.flags}};
}

json to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"passed", r.passed()}, {"checks", checks}};
}

json to_json(const BoxCountResult& r) {
  return {{"slope", r.slope}, {"r2", r.r2}, {"scales", r.scales}, {"counts", r.counts}};
}

}  // namespace gls
