#include "gls/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gls/config.hpp"
#include "gls/errors.hpp"

namespace gls::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string scheme;
  std::string out;
  std::optional<double> tol;
  std::uint64_t seed = 1;

  // encode / decode
  double x = 0.0;
  std::size_t n = 25;
  std::string digits;

  // dim
  std::string support = "all";
  std::string method = "auto";
  Index k_max = LimitOptions{}.k_max;

  // sample / boxdim / cdf
  std::string p;
  std::size_t count = 100000;
  std::string in;
  std::string scales;
  bool compare = false;
  std::size_t grid = 1000;
};

GLSScheme require_scheme(const Options& o, bool checked = true) {
  if (o.scheme.empty()) throw ConfigError("scheme", "--scheme is required");
  return load_scheme(o.scheme, checked);
}

// Writes to --out when given, else to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("out", "cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string meta_path(const std::string& csv) { return csv + ".meta.json"; }

std::vector<double> read_sample_csv(const std::string& path) {
  if (path.empty()) throw ConfigError("in", "--in is required");
  std::ifstream in(path);
  if (!in) throw ConfigError("in", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "index,x") throw ConfigError("in", "expected header 'index,x'");
  std::vector<double> points;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double x = 0.0;
    std::size_t used = 0;
    try {
      x = std::stod(line.substr(comma + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (comma == std::string::npos || used == 0 || !(x >= 0.0 && x <= 1.0)) {
      throw ConfigError("in", "malformed row " + std::to_string(row + 1));
    }
    points.push_back(x);
    ++row;
  }
  if (points.empty()) throw ConfigError("in", "no sample rows");
  return points;
}

int cmd_encode(const Options& o, std::ostream& out) {
  const GLSScheme scheme = require_scheme(o);
  if (o.n == 0) throw ConfigError("n", "rank must be at least 1");
  if (!(o.x >= 0.0 && o.x <= 1.0)) throw ConfigError("x", "must lie in [0,1]");
  out << format_digits(encode(scheme, o.x, o.n)) << "\n";
  return kOk;
}

int cmd_decode(const Options& o, std::ostream& out) {
  const GLSScheme scheme = require_scheme(o);
  const DigitString d = parse_digits(o.digits);
  if (const auto m = scheme.weights().alphabet_size()) {
    for (Index j : d.digits) {
      if (j >= *m) throw ConfigError("digits", "digit " + std::to_string(j) + " is outside the alphabet");
    }
  }
  out << format_real(decode(scheme, d), 15) << "\n";
  return kOk;
}

int cmd_dim(const Options& o, std::ostream& out) {
  const GLSScheme scheme = require_scheme(o);
  const SupportSet v = parse_support(o.support);
  const double tol = o.tol.value_or(default_tolerance(restrict_to_alphabet(v, scheme.weights())));
  if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");
  const auto& w = scheme.weights();
  DimensionResult r;
  if (o.method == "auto") {
    r = dim_hausdorff(w, v, tol);
  } else if (o.method == "sup") {
    r = dim_sup(w, v, tol);
  } else if (o.method == "root") {
    r = dim_root(w, v, tol);
  } else if (o.method == "limit") {
    LimitOptions lo;
    lo.k_max = o.k_max;
    if (lo.k_max < 2) throw ConfigError("k-max", "must be at least 2");
    r = dim_limit(w, v, tol, lo);
  } else {
    throw ConfigError("method", "expected root, limit, sup or auto");
  }
  out << to_json(r).dump() << "\n";
  return kOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const GLSScheme scheme = require_scheme(o);
  if (o.p.empty()) throw ConfigError("p", "--p is required");
  if (o.n == 0) throw ConfigError("n", "rank must be at least 1");
  if (o.count == 0) throw ConfigError("count", "must be at least 1");
  const DigitDistribution p = parse_digit_distribution(o.p, scheme.weights());
  const SpectrumSample s = sample_spectrum(scheme, p, o.n, o.count, o.seed);

  Sink sink(o.out, out);
  auto& csv = sink.stream();
  csv << "index,x\n";
  for (std::size_t j = 0; j < s.points.size(); ++j) csv << j << "," << format_real(s.points[j], 17) << "\n";
  if (!o.out.empty()) {
    std::ofstream meta(meta_path(o.out));
    const json m = {{"rng", std::string(SplitMix64::kName)},
                    {"seed", o.seed},
                    {"n", o.n},
                    {"count", o.count},
                    {"p", p.describe()},
                    {"folded_mass", p.folded_mass()},
                    {"q_max", scheme.weights().q_max()},
                    {"scheme", read_json_file(o.scheme)}};
    meta << m.dump(2) << "\n";
  }
  return kOk;
}

int cmd_boxdim(const Options& o, std::ostream& out) {
  const std::vector<double> points = read_sample_csv(o.in);
  if (o.scales.empty()) throw ConfigError("scales", "--scales is required");
  const std::vector<double> scales = parse_scales(o.scales);

  std::optional<json> meta;
  if (std::ifstream probe(meta_path(o.in)); probe) meta = read_json_file(meta_path(o.in));
  std::optional<double> floor;
  if (meta && meta->contains("q_max") && meta->contains("n")) {
    floor = std::pow(meta->at("q_max").get<double>(), meta->at("n").get<double>());
  }

  BoxCountResult r;
  try {
    r = box_count(points, scales, floor);
  } catch (const PreconditionError& e) {
    throw ConfigError("scales", e.what());
  }
  if (!o.out.empty()) {
    Sink sink(o.out, out);
    sink.stream() << "epsilon,count\n";
    for (std::size_t j = 0; j < r.scales.size(); ++j) {
      sink.stream() << format_real(r.scales[j], 17) << "," << r.counts[j] << "\n";
    }
  }
  json summary = to_json(r);
  if (o.compare) {
    std::optional<GLSScheme> scheme;
    if (!o.scheme.empty()) {
      scheme = load_scheme(o.scheme);
    } else if (meta && meta->contains("scheme")) {
      scheme = scheme_from_json(meta->at("scheme"));
    } else {
      throw ConfigError("scheme", "--compare needs --scheme or a sample metadata file");
    }
    std::string p_spec = o.p;
    if (p_spec.empty() && meta && meta->contains("p")) p_spec = meta->at("p").get<std::string>();
    if (p_spec.empty()) throw ConfigError("p", "--compare needs --p or a sample metadata file");
    const DigitDistribution p = parse_digit_distribution(p_spec, scheme->weights());
    const double tol = o.tol.value_or(default_tolerance(restrict_to_alphabet(p.support(), scheme->weights())));
    const DimensionResult theory = spectrum_dimension(*scheme, p, tol);
    summary["theory"] = theory.value;
    summary["difference"] = r.slope - theory.value;
  }
  out << summary.dump() << "\n";
  return kOk;
}

int cmd_cdf(const Options& o, std::ostream& out) {
  const std::vector<double> points = read_sample_csv(o.in);
  if (o.grid < 2) throw ConfigError("grid", "must be at least 2");
  Sink sink(o.out, out);
  sink.stream() << "x,F\n";
  for (const auto& [x, f] : empirical_cdf(points, o.grid)) {
    sink.stream() << format_real(x, 17) << "," << format_real(f, 17) << "\n";
  }
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const GLSScheme scheme = require_scheme(o, false);
  const ValidationReport report = validate_scheme(scheme);
  out << to_json(report).dump(2) << "\n";
  return report.passed() ? kOk : kConfigError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Luroth series expansions and Hausdorff dimensions", "glsdim"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--scheme", o.scheme, "Scheme configuration (JSON)");
  app.add_option("--out", o.out, "Output file");
  app.add_option("--tol", o.tol, "Tolerance");
  app.add_option("--seed", o.seed, "RNG seed");

  auto* encode_cmd = app.add_subcommand("encode", "Digits of x");
  encode_cmd->add_option("--x", o.x)->required();
  encode_cmd->add_option("--n", o.n)->required();
  auto* decode_cmd = app.add_subcommand("decode", "Left endpoint of a cylinder");
  decode_cmd->add_option("--digits", o.digits)->required();
  auto* dim_cmd = app.add_subcommand("dim", "Hausdorff dimension of C[GLS,V]");
  dim_cmd->add_option("--V", o.support, "all | exclude:<list> | only:<list>");
  dim_cmd->add_option("--method", o.method, "root | limit | sup | auto");
  dim_cmd->add_option("--k-max", o.k_max, "Largest truncation for the limit route");
  auto* sample_cmd = app.add_subcommand("sample", "Sample the i.i.d.-digit random variable");
  sample_cmd->add_option("--p", o.p, "d:p,... | proportional:<V>")->required();
  sample_cmd->add_option("--n", o.n, "Digits per point");
  sample_cmd->add_option("--count", o.count, "Number of points");
  auto* boxdim_cmd = app.add_subcommand("boxdim", "Box-counting slope of a sample");
  boxdim_cmd->add_option("--in", o.in)->required();
  boxdim_cmd->add_option("--scales", o.scales, "b^from..b^to | e1,e2,...")->required();
  boxdim_cmd->add_flag("--compare", o.compare, "Report the theoretical spectrum dimension");
  boxdim_cmd->add_option("--p", o.p, "Digit law for --compare");
  auto* cdf_cmd = app.add_subcommand("cdf", "Empirical distribution function of a sample");
  cdf_cmd->add_option("--in", o.in)->required();
  cdf_cmd->add_option("--grid", o.grid);
  auto* validate_cmd = app.add_subcommand("validate", "Check a scheme configuration");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*encode_cmd) return cmd_encode(o, out);
    if (*decode_cmd) return cmd_decode(o, out);
    if (*dim_cmd) return cmd_dim(o, out);
    if (*sample_cmd) return cmd_sample(o, out);
    if (*boxdim_cmd) return cmd_boxdim(o, out);
    if (*cdf_cmd) return cmd_cdf(o, out);
    if (*validate_cmd) return cmd_validate(o, out);
  } catch (const DeltaInfinityError& e) {
    err << "DeltaInfinity: " << e.what() << "\n";
    return kDeltaInfinity;
  } catch (const DigitOverflowError& e) {
    err << "DigitOverflow: " << e.what() << "\n";
    return kDeltaInfinity;
  } catch (const NoRootError& e) {
    err << "NoRoot: " << e.what() << "\n";
    return kNoRoot;
  } catch (const IndecisiveBoundError& e) {
    err << "IndecisiveBound: " << e.what() << "\n";
    return kIndecisiveBound;
  } catch (const DegenerateFitError& e) {
    err << "DegenerateFit: " << e.what() << "\n";
    return kDegenerateFit;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace gls::cli
