// Command-line front end: `simulate` writes the trace family and budget,
// `budget` writes the ledger only.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "sqzloop/config.hpp"
#include "sqzloop/errors.hpp"
#include "sqzloop/export.hpp"
#include "sqzloop/scenario.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Trace h is stored rounded to 6 significant digits; a re-parsed sum may
// differ from it by a few rounding steps.
constexpr double kSumCheckToleranceDb = 2e-3;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string grid;
  std::optional<long long> seed;  // reserved, everything is deterministic
};

sqzloop::ScenarioConfig load(const Options& opt) {
  auto config = opt.config_path.empty() ? sqzloop::default_config()
                                        : sqzloop::load_config(opt.config_path);
  if (!opt.grid.empty()) sqzloop::override_grid(config, sqzloop::parse_grid_spec(opt.grid));
  return config;
}

void print_stages(const sqzloop::BudgetReport& r) {
  fmt::print("ledger stages [dB]: {:.3f} -> {:.3f} -> {:.3f}\n", r.stages.after_loss_and_phase_db,
             r.stages.after_coupling_db, r.stages.final_db);
  for (const auto& s : r.stages.floored) fmt::print("warning: stage {} floored at 0 dB\n", s);
  for (const auto& d : r.discrepancies) {
    fmt::print("discrepancy: {} computed {:.4g} vs stated {:.4g} ({})\n", d.name, d.computed,
               d.stated, d.note);
  }
}

int run_simulate(const Options& opt) {
  const auto config = load(opt);
  std::cout << sqzloop::format_echo(config.echo);
  const auto result = sqzloop::run_scenario(config);
  const auto format = opt.format == "json" ? sqzloop::TraceFormat::kJson : sqzloop::TraceFormat::kCsv;
  const auto traces_path = sqzloop::export_traces(result.traces, opt.out_dir, format);
  const auto budget_path = sqzloop::export_budget(result.budget, opt.out_dir, &result.anchors);

  if (format == sqzloop::TraceFormat::kCsv) {
    const double dev = sqzloop::max_trace_sum_deviation_db(sqzloop::read_csv(traces_path));
    if (dev > kSumCheckToleranceDb) {
      fmt::print(stderr, "error: trace_h deviates from d+e+f+g by {:.3g} dB after export\n", dev);
      return kExitValidation;
    }
  } else if (!(sqzloop::read_traces_json(traces_path) == result.traces)) {
    fmt::print(stderr, "error: exported JSON does not round-trip\n");
    return kExitValidation;
  }

  const auto& a = result.anchors;
  fmt::print("shot noise: {:.2f} dB/Hz; amplitude floor {:.2f} dB below\n", a.shot_noise_db,
             -a.amplitude_gap_db);
  fmt::print("servo unity gain: {:.4g} Hz ({})\n", a.unity_gain_frequency_hz,
             a.unity_gain_calibrated ? "calibrated" : "user");
  if (!result.amplification_warnings.empty()) {
    fmt::print("warning: loop amplifies at {} grid points (first at {:.6g} Hz)\n",
               result.amplification_warnings.size(), result.amplification_warnings.front());
  }
  print_stages(result.budget);
  fmt::print("wrote {}\nwrote {}\n", traces_path.string(), budget_path.string());
  return EXIT_SUCCESS;
}

int run_budget(const Options& opt) {
  const auto config = load(opt);
  std::cout << sqzloop::format_echo(config.echo);
  const auto report = sqzloop::build_budget_report(config.budget, config.ledger(),
                                                   config.antisqueezing_db, config.phase_mode);
  const auto path = sqzloop::export_budget(report, opt.out_dir);
  print_stages(report);
  fmt::print("wrote {}\n", path.string());
  return EXIT_SUCCESS;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "Scenario file (YAML); defaults when omitted");
  cmd->add_option("--out", opt.out_dir, "Output directory");
  cmd->add_option("--grid", opt.grid, "Frequency grid override FMIN:FMAX:N");
  cmd->add_option("--seed", opt.seed, "Reserved; output is deterministic");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light phase stabilization loop simulator"};
  app.require_subcommand(1);
  Options opt;
  auto* simulate = app.add_subcommand("simulate", "Synthesize the trace family and budget");
  add_common(simulate, opt);
  simulate->add_option("--format", opt.format, "Trace file format")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* budget = app.add_subcommand("budget", "Write the degradation ledger only");
  add_common(budget, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? EXIT_SUCCESS : kExitValidation;
  }

  try {
    return simulate->parsed() ? run_simulate(opt) : run_budget(opt);
  } catch (const sqzloop::IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kExitIo;
  } catch (const sqzloop::ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  }
}
