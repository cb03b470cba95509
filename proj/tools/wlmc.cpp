// wlmc: worldline Monte Carlo experiment runner.
//
// Exit status: 0 success, 1 computation or validation failure, 2 invalid
// config or usage, 3 no fit window found.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wlmc/cli/commands.hpp"
#include "wlmc/cli/config.hpp"
#include "wlmc/cli/output.hpp"

namespace {

using namespace wlmc;
using namespace wlmc::cli;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string scan;
  std::string inject;
};

int finish(const CommandResult& r, const ExperimentConfig& c, const Options& o) {
  const std::string path = o.out.empty() ? c.out_path : o.out;
  emit(path, r.csv);
  std::string manifest = c.manifest_path;
  if (manifest.empty() && !path.empty()) manifest = path + ".manifest.json";
  if (!manifest.empty()) write_atomic(manifest, r.manifest.to_json().dump(2) + "\n");
  for (const auto& w : r.manifest.warnings) std::cerr << "warning: " << w << "\n";
  return r.exit_code;
}

int run(const std::string& command, const Options& o) {
  if (command == "validate") {
    Faults faults;
    if (o.inject == "omega-variance") faults.unit_variance_omega = true;
    else if (o.inject == "smoothing-sign") faults.flipped_smoothing_sign = true;
    const CommandResult r = cmd_validate(faults, Execution{o.threads.value_or(0)});
    if (o.out.empty()) std::cout << r.csv;
    else write_atomic(o.out, r.csv);
    return r.exit_code;
  }
  const ExperimentConfig c = load_config(o.config, o.seed);
  const Execution exec{o.threads.value_or(c.threads)};
  if (command == "generate-loops") return finish(cmd_generate_loops(c, exec), c, o);
  if (command == "kernel-scan") return finish(cmd_kernel_scan(c, exec), c, o);
  if (command == "energy-fit") return finish(cmd_energy_fit(c, exec, o.scan), c, o);
  if (command == "pv-hist") return finish(cmd_pv_hist(c, exec), c, o);
  if (command == "classical") return finish(cmd_classical(c, exec), c, o);
  throw Error(ErrorCode::InvalidArgument, "unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wlmc: worldline Monte Carlo for Euclidean propagators"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* cfg = sub->add_option("--config", o.config, "INI experiment config")->check(CLI::ExistingFile);
    if (needs_config) cfg->required();
    sub->add_option("--out", o.out, "output path (default: [output] path, else stdout)");
    sub->add_option("--seed", o.seed, "overrides [ensemble] seed");
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  };
  common(app.add_subcommand("generate-loops", "write a unit-loop ensemble as CSV"), true);
  common(app.add_subcommand("kernel-scan", "estimate ln K over the t grid"), true);
  auto* fit = app.add_subcommand("energy-fit", "fit E from the large-t decay of ln K");
  common(fit, true);
  fit->add_option("--scan", o.scan, "kernel-scan CSV to fit instead of running the scan")->check(CLI::ExistingFile);
  common(app.add_subcommand("pv-hist", "histogram of t v with the oscillator reference"), true);
  common(app.add_subcommand("classical", "dominant trajectories against the classical path"), true);
  auto* val = app.add_subcommand("validate", "fast invariant suite");
  common(val, false);
  val->add_option("--inject-fault", o.inject, "deliberate defect for testing the suite")
      ->check(CLI::IsMember({"omega-variance", "smoothing-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const Error& e) {
    std::cerr << "wlmc " << command << ": " << e.what() << "\n";
    if (e.code() == ErrorCode::ConfigInvalid) return kExitConfig;
    if (e.code() == ErrorCode::WindowNotFound) return kExitWindowNotFound;
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "wlmc " << command << ": " << e.what() << "\n";
    return kExitFailure;
  }
}
