/**
 * @file output.hpp
 * @brief CSV text assembly, atomic file writes and the run manifest.
 *
 * CSV: comma-separated, 17 significant digits, one leading '#' metadata
 * block, then a mandatory header row.
 */
#ifndef WLMC_CLI_OUTPUT_HPP
#define WLMC_CLI_OUTPUT_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "wlmc/cli/config.hpp"
#include "wlmc/errors.hpp"

namespace wlmc::cli {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void meta(const std::string& key, double value) { meta(key, format_real(value)); }
  void header(std::initializer_list<std::string> columns) { header_.assign(columns); }
  void header(std::vector<std::string> columns) { header_ = std::move(columns); }

  /// Cells are already formatted.
  void row(std::vector<std::string> cells) {
    require_width(cells.size());
    rows_.push_back(std::move(cells));
  }
  void row(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_real(v));
    row(std::move(cells));
  }
  /// Trailing comment line, after the data.
  void footer(const std::string& key, double value) { footer_.emplace_back(key, format_real(value)); }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + "=" + v + "\n";
    out += join(header_);
    for (const auto& r : rows_) out += join(r);
    for (const auto& [k, v] : footer_) out += "# " + k + "=" + v + "\n";
    return out;
  }

 private:
  void require_width(std::size_t n) const {
    wlmc::detail::require(n == header_.size(), ErrorCode::InvalidArgument, "CSV row width differs from header");
  }
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    return line + "\n";
  }

  std::vector<std::pair<std::string, std::string>> meta_, footer_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` next to `path` and renames it into place.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoFailure, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot move output into '" + path + "'");
  }
}

/// `path` empty: stdout.
inline void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content << std::flush;
    return;
  }
  write_atomic(path, content);
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, std::uint64_t>> per_t_seeds;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> warnings;
  std::string canonical_config;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "wlmc";
    j["version"] = std::string(kToolVersion);
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["config"] = canonical_config;
    auto& seeds = j["per_t_seeds"] = nlohmann::ordered_json::array();
    for (const auto& [t, s] : per_t_seeds) seeds.push_back({{"t", format_real(t)}, {"seed", s}});
    auto& times = j["timings_seconds"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : timings) times[k] = v;
    j["warnings"] = warnings;
    return j;
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Metadata lines shared by every command. Thread count and timings stay out.
inline void stamp(Csv& csv, const std::string& command, const ExperimentConfig& c) {
  csv.meta("tool", "wlmc " + std::string(kToolVersion));
  csv.meta("command", command);
  csv.meta("config_hash", config_hash(c));
  csv.meta("potential", potential_name(c.potential));
  csv.meta("method", method_name(c.method));
  csv.meta("algorithm", std::string(to_string(c.ensemble.algorithm)));
  csv.meta("N_l", std::to_string(c.ensemble.n_loops));
  csv.meta("N_p", std::to_string(c.ensemble.n_points));
  csv.meta("d", std::to_string(c.ensemble.dim));
  csv.meta("seed", std::to_string(c.ensemble.seed));
}

}  // namespace wlmc::cli

#endif  // WLMC_CLI_OUTPUT_HPP
