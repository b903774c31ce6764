#pragma once

// Trace-family synthesis for the squeezed-light phase stabilization loop.
//
// Traces b-h share one representation: RIN^2 referred to the phase readout
// of the in-loop converter, i.e. the out-of-loop witness signal rescaled by
// the cross-cavity normalization and divided by the in-loop conversion
// coefficient theta_1^2. In it the shot-noise readout term is flat at
// RSN^2 S / r and the amplitude/electronic floors keep their own levels.
// Trace a is the free-running frequency noise in Hz^2/Hz.
//
//   a  free-running frequency noise (synthetic power law)
//   b  classical closed-loop reference, squeezed_x = 1
//   c  quantum-enhanced closed loop after every ledger degradation
//   d  simulated enhancement: b lowered by the loss+phase ledger stage
//   e  servo-suppressed in-loop residual RIN_Y^2 / |1 - sqrt(t) G|^2
//   f  residual amplitude noise floor
//   g  electronic noise floor
//   h  uncorrelated sum of d, e, f, g

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sqzloop/budget.hpp"
#include "sqzloop/config.hpp"
#include "sqzloop/feedback_loop.hpp"
#include "sqzloop/noise_core.hpp"

namespace sqzloop {

// Flat floors are constant; power laws are evaluated segment by segment.
Spectrum synthesize_floor(const FloorSpec& spec, const FrequencyGrid& grid, SpectrumUnit unit);

struct Trace {
  std::string name;  // "trace_a" ... "trace_h"
  std::string role;
  Spectrum spectrum;
};

inline constexpr std::size_t kTraceCount = 8;

struct TraceSet {
  FrequencyGrid grid;
  std::array<Trace, kTraceCount> traces;

  const Spectrum& operator[](char letter) const;
  friend bool operator==(const TraceSet& a, const TraceSet& b);
};

std::string_view trace_role(std::size_t index);

// Scalar anchors printed next to the traces.
struct ScenarioAnchors {
  double shot_noise_rsn2 = 0.0;
  double shot_noise_db = 0.0;
  double amplitude_floor_db = 0.0;   // at the calibration frequency
  double amplitude_gap_db = 0.0;     // amplitude floor minus shot noise
  double electronic_floor_db = 0.0;  // at the calibration frequency
  double cross_cavity_normalization = 0.0;
  double cross_cavity_normalization_db = 0.0;
  double unity_gain_frequency_hz = 0.0;
  bool unity_gain_calibrated = false;
  double calibration_frequency_hz = 0.0;
  // Contributions at the calibration frequency as fractions of RSN^2.
  double coupling_inloop_residual = 0.0;
  double coupling_amplitude = 0.0;
  double coupling_electronic = 0.0;
};

struct ScenarioResult {
  TraceSet traces;
  BudgetReport budget;
  ScenarioAnchors anchors;
  // Grid frequencies where the loop amplifies (|1 - sqrt(t) G| < 1).
  std::vector<double> amplification_warnings;
};

// Unity-gain frequency at which the suppressed free-running phase term fills
// the part of the cross-coupling budget the amplitude and electronic floors
// leave at the calibration frequency.
double calibrate_unity_gain(const ScenarioConfig& config);

ServoModel servo_for(const ScenarioConfig& config);

ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace sqzloop
