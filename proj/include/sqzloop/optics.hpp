#pragma once

// Optical elements acting on quadrature noise variances: the detuned
// phase-to-amplitude converter cavity, the tap beam splitter where the
// squeezed vacuum is injected, and the loss / phase-jitter degradations of
// the squeezed state.

#include <string>
#include <vector>

#include "sqzloop/noise_core.hpp"

namespace sqzloop {

enum class DetuningRegime { kHalfDetuned, kThreeTimesHalfDetuned, kCustom };

class CavityParams {
 public:
  // fwhm_hz is the ordinary linewidth; it is stored as an angular rate.
  CavityParams(double fwhm_hz, DetuningRegime regime, double excess_loss = 0.0,
               double custom_slope = 1.0);

  static CavityParams half_detuned(double fwhm_hz, double excess_loss = 0.0) {
    return {fwhm_hz, DetuningRegime::kHalfDetuned, excess_loss};
  }
  static CavityParams three_times_half_detuned(double fwhm_hz, double excess_loss = 0.0) {
    return {fwhm_hz, DetuningRegime::kThreeTimesHalfDetuned, excess_loss};
  }

  double kappa() const noexcept { return kappa_; }  // rad/s
  double fwhm_hz() const noexcept;
  double slope() const noexcept { return slope_; }
  DetuningRegime regime() const noexcept { return regime_; }
  double excess_loss() const noexcept { return excess_loss_; }

 private:
  double kappa_;
  DetuningRegime regime_;
  double slope_;
  double excess_loss_;
};

class BeamSplitter {
 public:
  BeamSplitter(double t, double r);
  static BeamSplitter from_reflectivity(double r) { return {1.0 - r, r}; }

  double t() const noexcept { return t_; }
  double r() const noexcept { return r_; }

 private:
  double t_;
  double r_;
};

struct NamedValue {
  std::string name;
  double value;
};

class SqueezerParams {
 public:
  static constexpr double kDefaultAntisqueezingDb = 17.0;

  SqueezerParams(double squeezing_db, double antisqueezing_db,
                 std::vector<NamedValue> efficiencies = {},
                 std::vector<NamedValue> phase_jitters_mrad = {});

  double squeezing_db() const noexcept { return squeezing_db_; }
  double antisqueezing_db() const noexcept { return antisqueezing_db_; }
  const std::vector<NamedValue>& efficiencies() const noexcept { return efficiencies_; }
  const std::vector<NamedValue>& phase_jitters_mrad() const noexcept { return phase_jitters_mrad_; }

  double total_efficiency() const;
  // Jitters combine by linear sum, matching the budget ledger's default mode.
  double total_jitter_rad() const;

 private:
  double squeezing_db_;
  double antisqueezing_db_;
  std::vector<NamedValue> efficiencies_;
  std::vector<NamedValue> phase_jitters_mrad_;
};

// Small-angle noise-ellipse rotation slope * omega / kappa.
double rotation_angle(const CavityParams& cavity, double f_hz);

// Amplitude quadrature seen by the in-loop detector when the squeezed field
// is locked to -theta: the squeezed X variance enters with weight r only.
double detected_inloop_variance(const QuadratureVariances& input,
                                const QuadratureVariances& squeezed,
                                const BeamSplitter& bs, double theta);

// Combined field before the converter cavity, squeezed field rotated by
// lock_angle.
QuadratureVariances couple_at_bs(const QuadratureVariances& input,
                                 const QuadratureVariances& squeezed,
                                 const BeamSplitter& bs, double lock_angle);

QuadratureVariances apply_loss(const QuadratureVariances& v, double eta);

// Average over a zero-mean Gaussian rotation with RMS sigma_rad.
QuadratureVariances apply_phase_jitter(const QuadratureVariances& v, double sigma_rad);

// dB state -> loss (product of efficiencies) -> jitter (summed RMS).
QuadratureVariances detected_squeezing(const SqueezerParams& params);

}  // namespace sqzloop
