#pragma once

// Shot-noise scaling, servo transfer function and the in-loop/out-of-loop
// relative-intensity-noise spectra of the phase stabilization loop.
//
// Conventions:
//  * RIN_Y^2 (the phase-quadrature RIN of the free-running laser) is carried
//    as a phase-noise spectrum in rad^2/Hz; the two are used interchangeably
//    so that S_nu(f) = f^2 S_phi(f) = f^2 RIN_Y^2.
//  * The converter cavities map RIN_Y^2 into detected RIN with the
//    coefficient theta^2 = (slope * omega / kappa)^2.

#include <complex>
#include <optional>
#include <vector>

#include "sqzloop/noise_core.hpp"
#include "sqzloop/optics.hpp"

namespace sqzloop {

namespace constants {
inline constexpr double kPlanck = 6.62607015e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
}  // namespace constants

struct DetectionParams {
  DetectionParams(double power_w, double wavelength_m);

  double power_w;
  double wavelength_m;

  double optical_frequency_hz() const { return constants::kSpeedOfLight / wavelength_m; }
};

// 2 h nu / P: shot-noise RIN^2 of the detected beam, 1/Hz.
double shot_noise_rsn2(const DetectionParams& det);

struct ServoModel {
  ServoModel(double unity_gain_frequency_hz, int integrator_order = 1,
             double delay_s = 0.0, std::optional<double> low_pass_corner_hz = std::nullopt);

  double unity_gain_frequency_hz;
  int integrator_order;
  double delay_s;
  std::optional<double> low_pass_corner_hz;
};

// G(f) = (f_ug / (i f))^n * exp(-i 2 pi f tau) / (1 + i f / f_lp).
std::complex<double> servo_gain(const ServoModel& servo, double f_hz);

// Below this, |1 - sqrt(t) G| is treated as a singularity.
inline constexpr double kSingularityThreshold = 1e-6;

// |1 - sqrt(t) G(f)|; throws SingularityError below the threshold.
double loop_suppression(std::complex<double> gain, const BeamSplitter& bs, double f_hz);
double loop_suppression(const ServoModel& servo, const BeamSplitter& bs, double f_hz);

// Frequencies where |1 - sqrt(t) G| < 1, i.e. the loop amplifies instead of
// suppressing. Reported as warnings, not errors.
std::vector<double> amplification_frequencies(const ServoModel& servo, const BeamSplitter& bs,
                                              const FrequencyGrid& grid);

// Noise floors at one frequency (linear).
struct FloorLevels {
  double rin_x2 = 0.0;      // residual amplitude RIN^2
  double electronic = 0.0;  // detector electronic noise, RIN-equivalent
  double rin_y2 = 0.0;      // free-running phase-quadrature RIN^2
};

class NoiseFloors {
 public:
  NoiseFloors(Spectrum residual_amplitude_rin, Spectrum electronic_noise,
              Spectrum free_running_phase);

  const Spectrum& residual_amplitude_rin() const noexcept { return residual_amplitude_rin_; }
  const Spectrum& electronic_noise() const noexcept { return electronic_noise_; }
  const Spectrum& free_running_phase() const noexcept { return free_running_phase_; }
  const FrequencyGrid& grid() const noexcept { return residual_amplitude_rin_.grid(); }

  // Exact at grid points, log-log interpolated between them. Outside the
  // grid span is a domain error.
  FloorLevels at(double f_hz) const;
  FloorLevels at_index(std::size_t i) const;

 private:
  Spectrum residual_amplitude_rin_;
  Spectrum electronic_noise_;
  Spectrum free_running_phase_;
};

// In-loop detected RIN^2: RIN_X^2 + theta_1^2 RIN_Y^2 + RSN^2 S_S^X.
double inloop_rin2(const FloorLevels& floors, const CavityParams& cavity1,
                   const DetectionParams& det, double squeezed_x, double f_hz);
double inloop_rin2(const NoiseFloors& floors, const CavityParams& cavity1,
                   const DetectionParams& det, double squeezed_x, double f_hz);

// Out-of-loop witness without feedback: RIN_X^2 + theta_2^2 RIN_Y^2.
double outofloop_rin2_open(const FloorLevels& floors, const CavityParams& cavity2, double f_hz);
double outofloop_rin2_open(const NoiseFloors& floors, const CavityParams& cavity2, double f_hz);

// Out-of-loop witness with feedback:
//   RIN_X^2 + theta_2^2 (RIN_Y^2 / |1 - sqrt(t) G|^2 + RSN^2 S_S^X / r).
double outofloop_rin2_closed(const FloorLevels& floors, const CavityParams& cavity2,
                             std::complex<double> gain, const BeamSplitter& bs,
                             const DetectionParams& det, double squeezed_x, double f_hz);
double outofloop_rin2_closed(const NoiseFloors& floors, const CavityParams& cavity2,
                             const ServoModel& servo, const BeamSplitter& bs,
                             const DetectionParams& det, double squeezed_x, double f_hz);

// Servo-suppressed free-running phase term RIN_Y^2 / |1 - sqrt(t) G|^2.
double suppressed_phase_rin2(const FloorLevels& floors, const ServoModel& servo,
                             const BeamSplitter& bs, double f_hz);

Spectrum freq_noise_from_phase(const Spectrum& s_phi);
Spectrum phase_from_freq_noise(const Spectrum& s_nu);

// (slope_in kappa_out / (slope_out kappa_in))^2: rescales an out-of-loop
// phase readout to the in-loop cavity's conversion coefficient. For the
// half-detuned witness (slope 1) this is (slope_in kappa_out / kappa_in)^2.
double cross_cavity_normalization(const CavityParams& cavity_in, const CavityParams& cavity_out);

}  // namespace sqzloop
