#include "sqzloop/optics.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "sqzloop/errors.hpp"

namespace sqzloop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double slope_for(DetuningRegime regime, double custom) {
  switch (regime) {
    case DetuningRegime::kHalfDetuned: return 1.0;
    case DetuningRegime::kThreeTimesHalfDetuned: return 0.1;
    case DetuningRegime::kCustom: return custom;
  }
  return custom;
}

void check_angle(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) >= std::numbers::pi / 2.0) {
    throw DomainError(fmt::format("rotation angle {} outside |theta| < pi/2", theta));
  }
}

}  // namespace

CavityParams::CavityParams(double fwhm_hz, DetuningRegime regime, double excess_loss,
                           double custom_slope)
    : kappa_(kTwoPi * fwhm_hz),
      regime_(regime),
      slope_(slope_for(regime, custom_slope)),
      excess_loss_(excess_loss) {
  if (!std::isfinite(fwhm_hz) || fwhm_hz <= 0.0) {
    throw DomainError(fmt::format("cavity linewidth must be > 0 Hz, got {}", fwhm_hz));
  }
  if (!(slope_ > 0.0 && slope_ <= 1.0)) {
    throw DomainError(fmt::format("detuning slope must lie in (0, 1], got {}", slope_));
  }
  if (!(excess_loss >= 0.0 && excess_loss < 1.0)) {
    throw DomainError(fmt::format("cavity excess loss must lie in [0, 1), got {}", excess_loss));
  }
}

double CavityParams::fwhm_hz() const noexcept { return kappa_ / kTwoPi; }

BeamSplitter::BeamSplitter(double t, double r) : t_(t), r_(r) {
  if (!(r > 0.0 && r <= 1.0) || !(t >= 0.0 && t < 1.0)) {
    throw DomainError(fmt::format("beam splitter needs r in (0, 1] and t in [0, 1), got t={}, r={}", t, r));
  }
  if (std::abs(t + r - 1.0) > 1e-9) {
    throw DomainError(fmt::format("beam splitter t + r = {} != 1", t + r));
  }
}

SqueezerParams::SqueezerParams(double squeezing_db, double antisqueezing_db,
                               std::vector<NamedValue> efficiencies,
                               std::vector<NamedValue> phase_jitters_mrad)
    : squeezing_db_(squeezing_db),
      antisqueezing_db_(antisqueezing_db),
      efficiencies_(std::move(efficiencies)),
      phase_jitters_mrad_(std::move(phase_jitters_mrad)) {
  if (!std::isfinite(squeezing_db) || squeezing_db < 0.0) {
    throw DomainError(fmt::format("squeezing must be >= 0 dB, got {}", squeezing_db));
  }
  if (!std::isfinite(antisqueezing_db) || antisqueezing_db < squeezing_db) {
    throw DomainError(fmt::format(
        "anti-squeezing {} dB below squeezing {} dB violates the uncertainty bound",
        antisqueezing_db, squeezing_db));
  }
  for (const auto& e : efficiencies_) {
    if (!(e.value > 0.0 && e.value <= 1.0)) {
      throw DomainError(fmt::format("efficiency '{}' = {} outside (0, 1]", e.name, e.value));
    }
  }
  for (const auto& j : phase_jitters_mrad_) {
    if (!std::isfinite(j.value) || j.value < 0.0) {
      throw DomainError(fmt::format("phase jitter '{}' = {} mrad is negative", j.name, j.value));
    }
  }
}

double SqueezerParams::total_efficiency() const {
  double eta = 1.0;
  for (const auto& e : efficiencies_) eta *= e.value;
  return eta;
}

double SqueezerParams::total_jitter_rad() const {
  double mrad = 0.0;
  for (const auto& j : phase_jitters_mrad_) mrad += j.value;
  return mrad * 1e-3;
}

double rotation_angle(const CavityParams& cavity, double f_hz) {
  if (!std::isfinite(f_hz) || f_hz < 0.0) {
    throw DomainError(fmt::format("rotation_angle: frequency must be >= 0, got {}", f_hz));
  }
  return cavity.slope() * kTwoPi * f_hz / cavity.kappa();
}

double detected_inloop_variance(const QuadratureVariances& input,
                                const QuadratureVariances& squeezed,
                                const BeamSplitter& bs, double theta) {
  check_angle(theta);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return bs.t() * (input.s_x * c * c + input.s_y * s * s) + bs.r() * squeezed.s_x;
}

QuadratureVariances couple_at_bs(const QuadratureVariances& input,
                                 const QuadratureVariances& squeezed,
                                 const BeamSplitter& bs, double lock_angle) {
  check_angle(lock_angle);
  const double c2 = std::cos(lock_angle) * std::cos(lock_angle);
  const double s2 = 1.0 - c2;
  return {bs.t() * input.s_x + bs.r() * (squeezed.s_x * c2 + squeezed.s_y * s2),
          bs.t() * input.s_y + bs.r() * (squeezed.s_y * c2 + squeezed.s_x * s2)};
}

QuadratureVariances apply_loss(const QuadratureVariances& v, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError(fmt::format("loss transmission eta = {} outside (0, 1]", eta));
  }
  return {eta * v.s_x + (1.0 - eta), eta * v.s_y + (1.0 - eta)};
}

QuadratureVariances apply_phase_jitter(const QuadratureVariances& v, double sigma_rad) {
  if (!std::isfinite(sigma_rad) || sigma_rad < 0.0) {
    throw DomainError(fmt::format("phase jitter RMS must be >= 0, got {}", sigma_rad));
  }
  // E[cos^2] for a Gaussian angle; 1 - c written via expm1 to keep precision
  // at small sigma.
  const double one_minus_c = -0.5 * std::expm1(-2.0 * sigma_rad * sigma_rad);
  const double c = 1.0 - one_minus_c;
  return {c * v.s_x + one_minus_c * v.s_y, c * v.s_y + one_minus_c * v.s_x};
}

QuadratureVariances detected_squeezing(const SqueezerParams& params) {
  const auto initial = QuadratureVariances::from_db(params.squeezing_db(),
                                                    params.antisqueezing_db());
  return apply_phase_jitter(apply_loss(initial, params.total_efficiency()),
                            params.total_jitter_rad());
}

}  // namespace sqzloop
