#pragma once

// Scenario configuration: a YAML document whose absent fields fall back to
// the demonstrated experiment's setup values. See docs/scenario_format.md.

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqzloop/budget.hpp"
#include "sqzloop/feedback_loop.hpp"
#include "sqzloop/optics.hpp"

namespace sqzloop {

struct FlatFloor {
  double level_db;
};

struct PowerLawSegment {
  double f_corner_hz;
  double exponent;  // density ~ f^exponent
  double level_db;  // level at f_corner_hz
};

// Segments sorted by corner; segment k covers [corner_k, corner_{k+1}), the
// first one also extends below its corner. Junctions must be continuous.
struct PowerLawFloor {
  std::vector<PowerLawSegment> segments;
};

using FloorSpec = std::variant<FlatFloor, PowerLawFloor>;

// Junction mismatch (dB) above which a power law is rejected.
inline constexpr double kFloorJunctionToleranceDb = 1e-3;

void validate_floor(const FloorSpec& spec);
double floor_level_db(const FloorSpec& spec, double f_hz);

struct GridSpec {
  double f_min_hz = 1e3;
  double f_max_hz = 1e5;
  std::size_t points = 201;
};

// "FMIN:FMAX:N"
GridSpec parse_grid_spec(const std::string& text);

enum class Provenance { kUser, kPaperDefault, kCalibrated };
std::string_view provenance_name(Provenance p);

struct EchoLine {
  std::string key;
  std::string value;
  Provenance provenance;
  std::string source;  // where a default comes from
};

struct ScenarioConfig {
  GridSpec grid;
  DetectionParams detection{50e-6, 1550e-9};
  BeamSplitter beam_splitter = BeamSplitter::from_reflectivity(0.99);
  CavityParams inloop_cavity = CavityParams::three_times_half_detuned(7.5e6, 0.016);
  CavityParams outofloop_cavity = CavityParams::half_detuned(6.8e6);
  double squeezing_db = 10.6;
  double antisqueezing_db = SqueezerParams::kDefaultAntisqueezingDb;

  // Unset means: calibrate so the in-loop residual fills the rest of the
  // cross-coupling budget at calibration_frequency_hz.
  std::optional<double> unity_gain_frequency_hz;
  int integrator_order = 1;
  double servo_delay_s = 0.0;
  std::optional<double> low_pass_corner_hz;
  double calibration_frequency_hz = 8e3;

  FloorSpec residual_amplitude_rin = FlatFloor{-157.0};
  FloorSpec electronic_noise = FlatFloor{-160.0};
  FloorSpec free_running_phase = PowerLawFloor{{{1e3, -2.0, -90.0}}};

  BudgetTable budget = default_budget_table();
  double loss_degradation_db = 1.9;
  double phase_degradation_db = 0.6;
  std::optional<double> coupling_fraction;  // unset: sum of budget couplings
  double servo_imperfection_db = 0.9;
  PhaseSumMode phase_mode = PhaseSumMode::kLinearSum;

  std::vector<EchoLine> echo;

  SqueezerParams squeezer() const;
  EnhancementLedger ledger() const;
};

// Demonstrated-setup scenario with a fully populated echo.
ScenarioConfig default_config();

// Throws ParseError (with line) or ValidationError (naming the field).
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Replaces the grid and marks it user-provided in the echo.
void override_grid(ScenarioConfig& config, const GridSpec& grid);

std::string format_echo(const std::vector<EchoLine>& echo);

}  // namespace sqzloop
