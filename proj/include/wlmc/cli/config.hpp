/**
 * @file config.hpp
 * @brief Experiment configuration: INI parsing, schema validation, hashing.
 *
 * The file is flat INI with one section per module. Every key is checked
 * against the schema below before anything runs; unknown sections or keys
 * are rejected.
 *
 *   [potential]  kind, m, omega, a, nu, g, alpha, mu
 *   [endpoints]  y, x                       comma-separated, d components
 *   [tgrid]      t_min, t_max, t_step | t_list
 *   [ensemble]   algorithm, N_l, N_p, d, seed, n_ensembles
 *   [smoothing]  method, n_sub
 *   [scan]       projected, pairing, shared_ensemble
 *   [histogram]  t, n_bins
 *   [fit]        window, min_points, threshold, sign, reference_energy
 *   [classical]  t, n_sims
 *   [output]     path, manifest
 *   [run]        threads
 */
#ifndef WLMC_CLI_CONFIG_HPP
#define WLMC_CLI_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wlmc/analysis.hpp"
#include "wlmc/errors.hpp"
#include "wlmc/estimator.hpp"
#include "wlmc/loops.hpp"
#include "wlmc/potentials.hpp"

namespace wlmc::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct ExperimentConfig {
  PotentialSpec potential = Free{};
  double m = 1.0;
  std::vector<double> y, x;
  std::vector<double> t_grid;
  EnsembleSpec ensemble;
  std::size_t n_ensembles = 1;
  LineIntegralMethod method = Pointwise{};
  bool projected = false;
  /// Every t reuses the ensemble seeded by ensemble.seed.
  bool shared_ensemble = false;
  ParityPairing pairing = ParityPairing::Shared;
  std::optional<double> hist_t;
  std::size_t n_bins = 100;
  std::optional<Window> fit_window;  ///< empty: detect automatically
  std::size_t min_points = 5;
  double threshold = 3.0;
  EnergySign sign = EnergySign::BoundBelow;
  std::optional<double> reference_energy;
  std::optional<double> classical_t;
  std::size_t n_sims = 20;
  std::string out_path;
  std::string manifest_path;
  unsigned threads = 0;
  /// Sorted "section.key=value" lines of every result-affecting setting.
  std::string canonical;
};

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string config_hash(const ExperimentConfig& c) { return "fnv1a64:" + hex64(fnv1a64(c.canonical)); }

namespace detail {

[[noreturn]] inline void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, where + ": " + what);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& where, std::string_view raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    invalid(where, "expected a finite real, got '" + s + "'");
  return v;
}

inline std::uint64_t to_uint(const std::string& where, std::string_view raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    invalid(where, "expected a non-negative integer, got '" + s + "'");
  return v;
}

inline bool to_bool(const std::string& where, std::string_view raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  invalid(where, "expected true or false, got '" + s + "'");
}

inline std::vector<double> to_list(const std::string& where, std::string_view raw) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = raw.find(',', start);
    out.push_back(to_double(where, raw.substr(start, comma == std::string_view::npos ? raw.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Allowed keys per section.
inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"potential", {"kind", "m", "omega", "a", "nu", "g", "alpha", "mu"}},
      {"endpoints", {"y", "x"}},
      {"tgrid", {"t_min", "t_max", "t_step", "t_list"}},
      {"ensemble", {"algorithm", "N_l", "N_p", "d", "seed", "n_ensembles"}},
      {"smoothing", {"method", "n_sub"}},
      {"scan", {"projected", "pairing", "shared_ensemble"}},
      {"histogram", {"t", "n_bins"}},
      {"fit", {"window", "min_points", "threshold", "sign", "reference_energy"}},
      {"classical", {"t", "n_sims"}},
      {"output", {"path", "manifest"}},
      {"run", {"threads"}},
  };
  return s;
}

using Flat = std::map<std::string, std::string>;

class Reader {
 public:
  explicit Reader(Flat values) : values_(std::move(values)) {}

  std::optional<std::string> text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return trim(it->second);
  }
  std::optional<double> real(const std::string& key) {
    auto s = text(key);
    if (!s) return std::nullopt;
    return to_double(key, *s);
  }
  std::optional<std::uint64_t> uint(const std::string& key) {
    auto s = text(key);
    if (!s) return std::nullopt;
    return to_uint(key, *s);
  }
  double positive(const std::string& key, double fallback) {
    const double v = real(key).value_or(fallback);
    if (!(v > 0.0)) invalid(key, "must be positive");
    return v;
  }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Keys read from sections that some setting made irrelevant stay unused; flag them.
  void reject_unused(const std::set<std::string>& sections_in_use) const {
    for (const auto& [k, v] : values_) {
      const std::string section = k.substr(0, k.find('.'));
      if (sections_in_use.count(section) && !used_.count(k))
        invalid(k, "not used by potential kind or configuration");
    }
  }

 private:
  Flat values_;
  std::set<std::string> used_;
};

inline Flat flatten(const boost::property_tree::ptree& tree) {
  Flat flat;
  for (const auto& [section, body] : tree) {
    const auto& sch = schema();
    auto allowed = sch.find(section);
    if (allowed == sch.end()) invalid("[" + section + "]", "unknown section");
    if (!body.data().empty()) invalid(section, "top-level keys are not allowed");
    for (const auto& [key, value] : body) {
      if (!allowed->second.count(key)) invalid(section + "." + key, "unknown key");
      if (!value.empty()) invalid(section + "." + key, "nested keys are not allowed");
      flat[section + "." + key] = value.data();
    }
  }
  return flat;
}

inline LineIntegralMethod default_method(const PotentialSpec& p) {
  if (std::holds_alternative<DeltaWell>(p)) return CrossingCount{};
  if (std::holds_alternative<Coulomb>(p)) return SmoothedAnalytic{};
  if (std::holds_alternative<Yukawa>(p)) return SmoothedNumeric{};
  return Pointwise{};
}

}  // namespace detail

/// Parses and validates INI text. `seed_override` replaces ensemble.seed.
inline ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = {}) {
  using detail::invalid;
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    invalid("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  detail::Flat flat = detail::flatten(tree);
  detail::Reader r(flat);
  ExperimentConfig c;

  // potential
  const std::string kind = r.text("potential.kind").value_or("");
  c.m = r.positive("potential.m", 1.0);
  if (kind == "free") {
    c.potential = Free{};
  } else if (kind == "harmonic") {
    c.potential = Harmonic{c.m, r.positive("potential.omega", 1.0)};
  } else if (kind == "poschl-teller") {
    const double a = r.positive("potential.a", 1.0);
    const auto nu = r.uint("potential.nu").value_or(1);
    c.potential = PoschlTeller{a, static_cast<int>(nu), c.m};
  } else if (kind == "delta") {
    c.potential = DeltaWell{r.positive("potential.g", 1.0)};
  } else if (kind == "coulomb") {
    c.potential = Coulomb{r.positive("potential.alpha", 1.0)};
  } else if (kind == "yukawa") {
    const double alpha = r.positive("potential.alpha", 1.0);
    const double mu = r.real("potential.mu").value_or(0.0);
    if (mu < 0.0) invalid("potential.mu", "must be non-negative");
    c.potential = Yukawa{alpha, mu};
  } else {
    invalid("potential.kind", "expected free, harmonic, poschl-teller, delta, coulomb or yukawa, got '" + kind + "'");
  }
  try {
    validate(c.potential);
  } catch (const Error& e) {
    invalid("potential", e.what());
  }
  const bool singular = std::holds_alternative<Coulomb>(c.potential) || std::holds_alternative<Yukawa>(c.potential);

  // ensemble
  auto& e = c.ensemble;
  e.algorithm = LoopAlgorithm::VLoop;
  if (auto a = r.text("ensemble.algorithm")) {
    try {
      e.algorithm = parse_algorithm(*a);
    } catch (const Error&) {
      invalid("ensemble.algorithm", "expected vloop, yloop or lsol, got '" + *a + "'");
    }
  }
  e.n_loops = r.uint("ensemble.N_l").value_or(10'000);
  e.n_points = r.uint("ensemble.N_p").value_or(1000);
  e.seed = r.uint("ensemble.seed").value_or(1);
  if (seed_override) e.seed = *seed_override;
  c.n_ensembles = r.uint("ensemble.n_ensembles").value_or(1);
  if (c.n_ensembles == 0) invalid("ensemble.n_ensembles", "must be >= 1");
  if (e.n_loops == 0) invalid("ensemble.N_l", "must be >= 1");
  if (e.n_points == 0) invalid("ensemble.N_p", "must be >= 1");

  // endpoints fix d when given; otherwise d defaults to 3 for Coulomb and Yukawa
  auto ys = r.text("endpoints.y"), xs = r.text("endpoints.x");
  std::optional<std::uint64_t> d_cfg = r.uint("ensemble.d");
  if (ys) c.y = detail::to_list("endpoints.y", *ys);
  if (xs) c.x = detail::to_list("endpoints.x", *xs);
  if (ys && xs && c.y.size() != c.x.size()) invalid("endpoints", "y and x must have the same number of components");
  const std::size_t d_end = ys ? c.y.size() : xs ? c.x.size() : 0;
  std::size_t d = d_cfg ? *d_cfg : d_end ? d_end : singular ? 3 : 1;
  if (d < 1 || d > 3) invalid("ensemble.d", "must be 1, 2 or 3");
  if (d_end && d_end != d) invalid("endpoints", "component count does not match ensemble.d");
  e.dim = static_cast<int>(d);
  std::vector<double> fallback(d, 0.0);
  if (singular) fallback[0] = 0.01;
  if (!ys) c.y = fallback;
  if (!xs) c.x = fallback;

  // tgrid
  if (r.has("tgrid.t_list") && (r.has("tgrid.t_min") || r.has("tgrid.t_max") || r.has("tgrid.t_step")))
    invalid("tgrid", "give either t_list or t_min/t_max/t_step, not both");
  if (auto list = r.text("tgrid.t_list")) {
    c.t_grid = detail::to_list("tgrid.t_list", *list);
  } else if (r.has("tgrid.t_min") || r.has("tgrid.t_max") || r.has("tgrid.t_step")) {
    const auto lo = r.real("tgrid.t_min"), hi = r.real("tgrid.t_max"), step = r.real("tgrid.t_step");
    if (!lo || !hi || !step) invalid("tgrid", "t_min, t_max and t_step are all required");
    if (!(*step > 0.0) || *hi < *lo) invalid("tgrid", "need t_step > 0 and t_max >= t_min");
    const double span = (*hi - *lo) / *step;
    const auto n = static_cast<std::size_t>(std::llround(span));
    if (std::abs(span - static_cast<double>(n)) > 1e-9 * std::max(1.0, span))
      invalid("tgrid", "t_max - t_min is not a whole number of steps");
    // t_i = t_min + i t_step; the last point is t_max as written.
    for (std::size_t i = 0; i < n; ++i) c.t_grid.push_back(*lo + static_cast<double>(i) * *step);
    c.t_grid.push_back(*hi);
  }
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    if (!(c.t_grid[i] > 0.0)) invalid("tgrid", "every t must be positive");
    if (i > 0 && !(c.t_grid[i] > c.t_grid[i - 1])) invalid("tgrid", "t values must be strictly increasing");
  }

  // smoothing
  c.method = detail::default_method(c.potential);
  const std::string method = r.text("smoothing.method").value_or("auto");
  const auto n_sub = r.uint("smoothing.n_sub");
  if (method == "pointwise") c.method = Pointwise{};
  else if (method == "smoothed-analytic") c.method = SmoothedAnalytic{};
  else if (method == "smoothed-numeric") c.method = SmoothedNumeric{};
  else if (method == "crossing-count") c.method = CrossingCount{};
  else if (method != "auto") invalid("smoothing.method", "unknown method '" + method + "'");
  if (n_sub) {
    if (!std::holds_alternative<SmoothedNumeric>(c.method)) invalid("smoothing.n_sub", "only used by smoothed-numeric");
    if (*n_sub < 1) invalid("smoothing.n_sub", "must be >= 1");
    c.method = SmoothedNumeric{static_cast<int>(*n_sub)};
  }
  try {
    check_method(c.potential, c.method, e.dim);
  } catch (const Error& err) {
    invalid("smoothing.method", err.what());
  }

  // scan
  if (auto p = r.text("scan.projected")) c.projected = detail::to_bool("scan.projected", *p);
  if (auto p = r.text("scan.pairing")) {
    if (*p == "shared") c.pairing = ParityPairing::Shared;
    else if (*p == "mirrored") c.pairing = ParityPairing::Mirrored;
    else invalid("scan.pairing", "expected shared or mirrored");
  }
  if (auto p = r.text("scan.shared_ensemble")) c.shared_ensemble = detail::to_bool("scan.shared_ensemble", *p);
  if (c.projected && c.n_ensembles > 1) invalid("scan.projected", "projection uses a single ensemble per t");
  if (c.projected && !is_parity_even(c.potential)) invalid("scan.projected", "potential is not parity-even");

  // histogram
  if (auto t = r.real("histogram.t")) {
    if (!(*t > 0.0)) invalid("histogram.t", "must be positive");
    c.hist_t = *t;
  }
  c.n_bins = r.uint("histogram.n_bins").value_or(100);
  if (c.n_bins < 2) invalid("histogram.n_bins", "must be >= 2");

  // fit
  const std::string window = r.text("fit.window").value_or("auto");
  if (window != "auto") {
    const auto w = detail::to_list("fit.window", window);
    if (w.size() != 2 || !(w[0] < w[1])) invalid("fit.window", "expected 'auto' or 'lo,hi' with lo < hi");
    c.fit_window = Window{w[0], w[1]};
  }
  c.min_points = r.uint("fit.min_points").value_or(5);
  if (c.min_points < 3) invalid("fit.min_points", "must be >= 3");
  c.threshold = r.positive("fit.threshold", 3.0);
  if (auto s = r.text("fit.sign")) {
    if (*s == "below") c.sign = EnergySign::BoundBelow;
    else if (*s == "above") c.sign = EnergySign::BoundAbove;
    else invalid("fit.sign", "expected below or above");
  }
  c.reference_energy = r.real("fit.reference_energy");

  // classical
  if (auto t = r.real("classical.t")) {
    if (!(*t > 0.0)) invalid("classical.t", "must be positive");
    c.classical_t = *t;
  }
  c.n_sims = r.uint("classical.n_sims").value_or(20);
  if (c.n_sims < 2) invalid("classical.n_sims", "must be >= 2");

  // output and run settings do not enter the hash
  c.out_path = r.text("output.path").value_or("");
  c.manifest_path = r.text("output.manifest").value_or("");
  c.threads = static_cast<unsigned>(r.uint("run.threads").value_or(0));

  r.reject_unused({"potential"});

  std::ostringstream canon;
  for (const auto& [k, v] : flat) {
    if (k.rfind("output.", 0) == 0 || k.rfind("run.", 0) == 0 || k == "ensemble.seed") continue;
    canon << k << '=' << detail::trim(v) << '\n';
  }
  canon << "ensemble.seed=" << e.seed << '\n';
  c.canonical = canon.str();
  return c;
}

inline ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_override);
}

}  // namespace wlmc::cli

#endif  // WLMC_CLI_CONFIG_HPP
