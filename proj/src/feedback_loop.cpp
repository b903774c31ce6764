#include "sqzloop/feedback_loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "sqzloop/errors.hpp"

namespace sqzloop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_frequency(double f_hz, const char* op) {
  if (!std::isfinite(f_hz) || f_hz <= 0.0) {
    throw DomainError(fmt::format("{}: frequency must be > 0, got {}", op, f_hz));
  }
}

void check_squeezed(double squeezed_x) {
  if (!std::isfinite(squeezed_x) || squeezed_x <= 0.0) {
    throw DomainError(fmt::format("squeezed variance must be > 0, got {}", squeezed_x));
  }
}

double interpolate(const Spectrum& s, std::size_t lo, double w) {
  const double a = s[lo];
  const double b = s[lo + 1];
  if (a > 0.0 && b > 0.0) return std::exp((1.0 - w) * std::log(a) + w * std::log(b));
  return (1.0 - w) * a + w * b;
}

double theta_squared(const CavityParams& cavity, double f_hz) {
  const double theta = rotation_angle(cavity, f_hz);
  return theta * theta;
}

}  // namespace

DetectionParams::DetectionParams(double p, double lambda) : power_w(p), wavelength_m(lambda) {
  if (!std::isfinite(p) || p <= 0.0) {
    throw DomainError(fmt::format("detected power must be > 0 W, got {}", p));
  }
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw DomainError(fmt::format("wavelength must be > 0 m, got {}", lambda));
  }
}

double shot_noise_rsn2(const DetectionParams& det) {
  return 2.0 * constants::kPlanck * det.optical_frequency_hz() / det.power_w;
}

ServoModel::ServoModel(double f_ug, int order, double delay, std::optional<double> lp)
    : unity_gain_frequency_hz(f_ug), integrator_order(order), delay_s(delay), low_pass_corner_hz(lp) {
  if (!std::isfinite(f_ug) || f_ug <= 0.0) {
    throw DomainError(fmt::format("servo unity-gain frequency must be > 0, got {}", f_ug));
  }
  if (order < 1) throw DomainError(fmt::format("integrator order must be >= 1, got {}", order));
  if (!std::isfinite(delay) || delay < 0.0) {
    throw DomainError(fmt::format("servo delay must be >= 0, got {}", delay));
  }
  if (lp && (!std::isfinite(*lp) || *lp <= 0.0)) {
    throw DomainError(fmt::format("low-pass corner must be > 0, got {}", *lp));
  }
}

std::complex<double> servo_gain(const ServoModel& servo, double f_hz) {
  check_frequency(f_hz, "servo_gain");
  using namespace std::complex_literals;
  const std::complex<double> integrator = servo.unity_gain_frequency_hz / (1i * f_hz);
  std::complex<double> g = std::pow(integrator, servo.integrator_order);
  if (servo.delay_s > 0.0) g *= std::polar(1.0, -kTwoPi * f_hz * servo.delay_s);
  if (servo.low_pass_corner_hz) g /= 1.0 + 1i * (f_hz / *servo.low_pass_corner_hz);
  return g;
}

double loop_suppression(std::complex<double> gain, const BeamSplitter& bs, double f_hz) {
  const double mag = std::abs(1.0 - std::sqrt(bs.t()) * gain);
  if (!(mag >= kSingularityThreshold)) throw SingularityError(f_hz, mag);
  return mag;
}

double loop_suppression(const ServoModel& servo, const BeamSplitter& bs, double f_hz) {
  return loop_suppression(servo_gain(servo, f_hz), bs, f_hz);
}

std::vector<double> amplification_frequencies(const ServoModel& servo, const BeamSplitter& bs,
                                              const FrequencyGrid& grid) {
  std::vector<double> out;
  for (double f : grid.points()) {
    if (loop_suppression(servo, bs, f) < 1.0) out.push_back(f);
  }
  return out;
}

NoiseFloors::NoiseFloors(Spectrum amp, Spectrum elec, Spectrum phase)
    : residual_amplitude_rin_(std::move(amp)),
      electronic_noise_(std::move(elec)),
      free_running_phase_(std::move(phase)) {
  if (residual_amplitude_rin_.unit() != SpectrumUnit::kRinLinear ||
      electronic_noise_.unit() != SpectrumUnit::kRinLinear) {
    throw StructuralError("amplitude and electronic floors must be linear RIN^2 spectra");
  }
  if (free_running_phase_.unit() != SpectrumUnit::kPhaseNoiseLinear) {
    throw StructuralError("free-running floor must be a phase-noise spectrum");
  }
  if (!(electronic_noise_.grid() == grid()) || !(free_running_phase_.grid() == grid())) {
    throw StructuralError("noise floors must share one frequency grid");
  }
}

FloorLevels NoiseFloors::at_index(std::size_t i) const {
  return {residual_amplitude_rin_[i], electronic_noise_[i], free_running_phase_[i]};
}

FloorLevels NoiseFloors::at(double f_hz) const {
  const auto pts = grid().points();
  if (!(f_hz >= pts.front() && f_hz <= pts.back())) {
    throw DomainError(fmt::format("f = {} Hz outside floor grid [{}, {}]", f_hz, pts.front(), pts.back()));
  }
  const auto it = std::lower_bound(pts.begin(), pts.end(), f_hz);
  const auto idx = static_cast<std::size_t>(it - pts.begin());
  if (*it == f_hz) return at_index(idx);
  const std::size_t lo = idx - 1;
  const double w = std::log(f_hz / pts[lo]) / std::log(pts[idx] / pts[lo]);
  return {interpolate(residual_amplitude_rin_, lo, w), interpolate(electronic_noise_, lo, w),
          interpolate(free_running_phase_, lo, w)};
}

double inloop_rin2(const FloorLevels& floors, const CavityParams& cavity1,
                   const DetectionParams& det, double squeezed_x, double f_hz) {
  check_squeezed(squeezed_x);
  return floors.rin_x2 + theta_squared(cavity1, f_hz) * floors.rin_y2 +
         shot_noise_rsn2(det) * squeezed_x;
}

double inloop_rin2(const NoiseFloors& floors, const CavityParams& cavity1,
                   const DetectionParams& det, double squeezed_x, double f_hz) {
  return inloop_rin2(floors.at(f_hz), cavity1, det, squeezed_x, f_hz);
}

double outofloop_rin2_open(const FloorLevels& floors, const CavityParams& cavity2, double f_hz) {
  return floors.rin_x2 + theta_squared(cavity2, f_hz) * floors.rin_y2;
}

double outofloop_rin2_open(const NoiseFloors& floors, const CavityParams& cavity2, double f_hz) {
  return outofloop_rin2_open(floors.at(f_hz), cavity2, f_hz);
}

double outofloop_rin2_closed(const FloorLevels& floors, const CavityParams& cavity2,
                             std::complex<double> gain, const BeamSplitter& bs,
                             const DetectionParams& det, double squeezed_x, double f_hz) {
  check_squeezed(squeezed_x);
  if (!(bs.r() > 0.0)) throw DomainError("closed-loop readout needs r > 0");
  const double suppression = loop_suppression(gain, bs, f_hz);
  const double technical = floors.rin_y2 / (suppression * suppression);
  const double readout = shot_noise_rsn2(det) * squeezed_x / bs.r();
  return floors.rin_x2 + theta_squared(cavity2, f_hz) * (technical + readout);
}

double outofloop_rin2_closed(const NoiseFloors& floors, const CavityParams& cavity2,
                             const ServoModel& servo, const BeamSplitter& bs,
                             const DetectionParams& det, double squeezed_x, double f_hz) {
  return outofloop_rin2_closed(floors.at(f_hz), cavity2, servo_gain(servo, f_hz), bs, det,
                               squeezed_x, f_hz);
}

double suppressed_phase_rin2(const FloorLevels& floors, const ServoModel& servo,
                             const BeamSplitter& bs, double f_hz) {
  const double suppression = loop_suppression(servo, bs, f_hz);
  return floors.rin_y2 / (suppression * suppression);
}

Spectrum freq_noise_from_phase(const Spectrum& s_phi) {
  if (s_phi.unit() != SpectrumUnit::kPhaseNoiseLinear) {
    throw StructuralError(fmt::format("freq_noise_from_phase expects rad^2/Hz, got {}",
                                      unit_name(s_phi.unit())));
  }
  std::vector<double> v(s_phi.size());
  const auto f = s_phi.grid().points();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * f[i] * s_phi[i];
  return Spectrum(s_phi.grid(), std::move(v), SpectrumUnit::kFreqNoiseLinear);
}

Spectrum phase_from_freq_noise(const Spectrum& s_nu) {
  if (s_nu.unit() != SpectrumUnit::kFreqNoiseLinear) {
    throw StructuralError(fmt::format("phase_from_freq_noise expects Hz^2/Hz, got {}",
                                      unit_name(s_nu.unit())));
  }
  std::vector<double> v(s_nu.size());
  const auto f = s_nu.grid().points();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s_nu[i] / (f[i] * f[i]);
  return Spectrum(s_nu.grid(), std::move(v), SpectrumUnit::kPhaseNoiseLinear);
}

double cross_cavity_normalization(const CavityParams& cavity_in, const CavityParams& cavity_out) {
  const double ratio = (cavity_in.slope() * cavity_out.kappa()) /
                       (cavity_out.slope() * cavity_in.kappa());
  return ratio * ratio;
}

}  // namespace sqzloop
