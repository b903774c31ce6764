#include "sqzloop/scenario.hpp"

#include <cmath>

#include <fmt/core.h>

#include "sqzloop/errors.hpp"

namespace sqzloop {

Spectrum synthesize_floor(const FloorSpec& spec, const FrequencyGrid& grid, SpectrumUnit unit) {
  if (!is_linear(unit)) throw StructuralError("floors are synthesized as linear densities");
  validate_floor(spec);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = linear_from_db(floor_level_db(spec, grid[i]));
  return Spectrum(grid, std::move(v), unit);
}

namespace {

constexpr std::array<std::string_view, kTraceCount> kRoles = {
    "free-running frequency noise (synthetic)",
    "classical stabilization reference",
    "quantum-enhanced stabilization",
    "simulated squeezing enhancement",
    "in-loop residual",
    "residual amplitude noise",
    "electronic noise",
    "uncorrelated sum of d, e, f, g",
};

}  // namespace

std::string_view trace_role(std::size_t index) { return kRoles.at(index); }

const Spectrum& TraceSet::operator[](char letter) const {
  if (letter < 'a' || letter >= 'a' + static_cast<char>(kTraceCount)) {
    throw StructuralError(fmt::format("no trace '{}'", letter));
  }
  return traces[static_cast<std::size_t>(letter - 'a')].spectrum;
}

bool operator==(const TraceSet& a, const TraceSet& b) {
  if (!(a.grid == b.grid)) return false;
  for (std::size_t i = 0; i < kTraceCount; ++i) {
    const auto& x = a.traces[i];
    const auto& y = b.traces[i];
    if (x.name != y.name || x.role != y.role || !(x.spectrum == y.spectrum)) return false;
  }
  return true;
}

double calibrate_unity_gain(const ScenarioConfig& config) {
  const double f = config.calibration_frequency_hz;
  const double rsn2 = shot_noise_rsn2(config.detection);
  const double coupling = config.ledger().coupling_fraction;
  const double amp = linear_from_db(floor_level_db(config.residual_amplitude_rin, f));
  const double elec = linear_from_db(floor_level_db(config.electronic_noise, f));
  const double rin_y2 = linear_from_db(floor_level_db(config.free_running_phase, f));
  const double target = coupling * rsn2 - amp - elec;
  if (!(target > 0.0)) {
    throw ValidationError(fmt::format(
        "cannot calibrate servo: amplitude and electronic floors already exceed the {:.3g} "
        "coupling budget at {} Hz; set servo.unity_gain_frequency_hz", coupling, f));
  }
  if (rin_y2 <= target) {
    throw ValidationError(fmt::format(
        "cannot calibrate servo: free-running phase noise at {} Hz is already inside the "
        "coupling budget; set servo.unity_gain_frequency_hz", f));
  }
  auto residual = [&](double log_fug) {
    const ServoModel servo(std::pow(10.0, log_fug), config.integrator_order, config.servo_delay_s,
                           config.low_pass_corner_hz);
    const double s = loop_suppression(servo, config.beam_splitter, f);
    return rin_y2 / (s * s);
  };
  double lo = -3.0;
  double hi = 15.0;
  if (!(residual(lo) > target && residual(hi) < target)) {
    throw ValidationError("cannot calibrate servo: coupling target not bracketed by the servo model");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > target ? lo : hi) = mid;
  }
  return std::pow(10.0, 0.5 * (lo + hi));
}

ServoModel servo_for(const ScenarioConfig& config) {
  const double f_ug = config.unity_gain_frequency_hz ? *config.unity_gain_frequency_hz
                                                     : calibrate_unity_gain(config);
  return ServoModel(f_ug, config.integrator_order, config.servo_delay_s, config.low_pass_corner_hz);
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const FrequencyGrid grid = log_spaced_grid(config.grid.f_min_hz, config.grid.f_max_hz,
                                             config.grid.points);
  const NoiseFloors floors(synthesize_floor(config.residual_amplitude_rin, grid, SpectrumUnit::kRinLinear),
                           synthesize_floor(config.electronic_noise, grid, SpectrumUnit::kRinLinear),
                           synthesize_floor(config.free_running_phase, grid,
                                            SpectrumUnit::kPhaseNoiseLinear));
  const ServoModel servo = servo_for(config);
  const BudgetReport budget = build_budget_report(config.budget, config.ledger(),
                                                  config.antisqueezing_db, config.phase_mode);

  const double squeezed_b = 1.0;
  const double squeezed_c = linear_from_db(-budget.stages.final_db);
  const double squeezed_d = linear_from_db(-budget.stages.after_loss_and_phase_db);
  const double normalization =
      cross_cavity_normalization(config.inloop_cavity, config.outofloop_cavity);

  const std::size_t n = grid.size();
  std::vector<double> b(n), c(n), d(n), e(n);
  const FloorLevels quantum_only{};
  for (std::size_t i = 0; i < n; ++i) {
    const double f = grid[i];
    const auto gain = servo_gain(servo, f);
    const double theta1 = rotation_angle(config.inloop_cavity, f);
    auto readout = [&](double squeezed_x) {
      return outofloop_rin2_closed(quantum_only, config.outofloop_cavity, gain,
                                   config.beam_splitter, config.detection, squeezed_x, f) *
             normalization / (theta1 * theta1);
    };
    b[i] = readout(squeezed_b);
    c[i] = readout(squeezed_c);
    d[i] = readout(squeezed_d);
    e[i] = suppressed_phase_rin2(floors.at_index(i), servo, config.beam_splitter, f);
  }

  const auto rin = SpectrumUnit::kRinLinear;
  Spectrum trace_d(grid, std::move(d), rin);
  Spectrum trace_e(grid, std::move(e), rin);
  const std::array<Spectrum, 4> limiting = {trace_d, trace_e, floors.residual_amplitude_rin(),
                                            floors.electronic_noise()};

  ScenarioResult out{
      TraceSet{grid,
               {Trace{"trace_a", std::string(kRoles[0]), freq_noise_from_phase(floors.free_running_phase())},
                Trace{"trace_b", std::string(kRoles[1]), Spectrum(grid, std::move(b), rin)},
                Trace{"trace_c", std::string(kRoles[2]), Spectrum(grid, std::move(c), rin)},
                Trace{"trace_d", std::string(kRoles[3]), trace_d},
                Trace{"trace_e", std::string(kRoles[4]), trace_e},
                Trace{"trace_f", std::string(kRoles[5]), floors.residual_amplitude_rin()},
                Trace{"trace_g", std::string(kRoles[6]), floors.electronic_noise()},
                Trace{"trace_h", std::string(kRoles[7]), uncorrelated_sum(limiting)}}},
      budget,
      {},
      amplification_frequencies(servo, config.beam_splitter, grid)};

  auto& a = out.anchors;
  const double fc = config.calibration_frequency_hz;
  a.shot_noise_rsn2 = shot_noise_rsn2(config.detection);
  a.shot_noise_db = db_from_linear(a.shot_noise_rsn2);
  a.amplitude_floor_db = floor_level_db(config.residual_amplitude_rin, fc);
  a.amplitude_gap_db = a.amplitude_floor_db - a.shot_noise_db;
  a.electronic_floor_db = floor_level_db(config.electronic_noise, fc);
  a.cross_cavity_normalization = normalization;
  a.cross_cavity_normalization_db = db_from_linear(normalization);
  a.unity_gain_frequency_hz = servo.unity_gain_frequency_hz;
  a.unity_gain_calibrated = !config.unity_gain_frequency_hz.has_value();
  a.calibration_frequency_hz = fc;
  const FloorLevels at_fc{linear_from_db(a.amplitude_floor_db), linear_from_db(a.electronic_floor_db),
                          linear_from_db(floor_level_db(config.free_running_phase, fc))};
  a.coupling_inloop_residual =
      suppressed_phase_rin2(at_fc, servo, config.beam_splitter, fc) / a.shot_noise_rsn2;
  a.coupling_amplitude = at_fc.rin_x2 / a.shot_noise_rsn2;
  a.coupling_electronic = at_fc.electronic / a.shot_noise_rsn2;
  return out;
}

}  // namespace sqzloop
