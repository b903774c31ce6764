#include "sqzloop/noise_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/core.h>

#include "sqzloop/errors.hpp"

namespace sqzloop {

double db_from_linear(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError(fmt::format("db_from_linear: need finite x > 0, got {}", x));
  }
  return 10.0 * std::log10(x);
}

double linear_from_db(double d) {
  if (!std::isfinite(d)) {
    throw DomainError("linear_from_db: non-finite input");
  }
  return std::pow(10.0, d / 10.0);
}

FrequencyGrid::FrequencyGrid(std::vector<double> points_hz) {
  if (points_hz.empty()) throw DomainError("frequency grid is empty");
  for (std::size_t i = 0; i < points_hz.size(); ++i) {
    const double f = points_hz[i];
    if (!std::isfinite(f) || f <= 0.0) {
      throw DomainError(fmt::format("frequency grid point {} = {} is not finite positive", i, f));
    }
    if (i > 0 && !(f > points_hz[i - 1])) {
      throw DomainError(fmt::format("frequency grid not strictly increasing at index {}", i));
    }
  }
  points_ = std::make_shared<const std::vector<double>>(std::move(points_hz));
}

bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
  return a.same_storage(b) || *a.points_ == *b.points_;
}

FrequencyGrid log_spaced_grid(double f_min, double f_max, std::size_t n) {
  if (!(std::isfinite(f_min) && std::isfinite(f_max)) || !(f_min > 0.0) ||
      !(f_max > f_min) || n < 2) {
    throw DomainError(fmt::format(
        "log_spaced_grid: need 0 < f_min < f_max and n >= 2 (got {}, {}, {})",
        f_min, f_max, n));
  }
  std::vector<double> pts(n);
  const double lo = std::log10(f_min);
  const double span = std::log10(f_max) - lo;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = std::pow(10.0, lo + span * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  pts.front() = f_min;
  pts.back() = f_max;
  return FrequencyGrid(std::move(pts));
}

bool is_linear(SpectrumUnit u) noexcept {
  return u != SpectrumUnit::kRinDb && u != SpectrumUnit::kFreqNoiseDb;
}

std::string_view unit_name(SpectrumUnit u) noexcept {
  switch (u) {
    case SpectrumUnit::kRinLinear: return "rin2_per_hz";
    case SpectrumUnit::kRinDb: return "rin_db_per_hz";
    case SpectrumUnit::kFreqNoiseLinear: return "hz2_per_hz";
    case SpectrumUnit::kFreqNoiseDb: return "db_re_hz2_per_hz";
    case SpectrumUnit::kPhaseNoiseLinear: return "rad2_per_hz";
  }
  return "unknown";
}

SpectrumUnit unit_from_name(std::string_view name) {
  for (auto u : {SpectrumUnit::kRinLinear, SpectrumUnit::kRinDb,
                 SpectrumUnit::kFreqNoiseLinear, SpectrumUnit::kFreqNoiseDb,
                 SpectrumUnit::kPhaseNoiseLinear}) {
    if (unit_name(u) == name) return u;
  }
  throw StructuralError(fmt::format("unknown spectrum unit '{}'", name));
}

Spectrum::Spectrum(FrequencyGrid grid, std::vector<double> values, SpectrumUnit unit)
    : grid_(std::move(grid)), values_(std::move(values)), unit_(unit) {
  if (values_.size() != grid_.size()) {
    throw StructuralError(fmt::format("spectrum has {} values for a {}-point grid",
                                      values_.size(), grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) {
      throw DomainError(fmt::format("spectrum value {} is not finite", i));
    }
    if (is_linear(unit_) && v < 0.0) {
      throw DomainError(fmt::format("linear spectrum value {} is negative ({})", i, v));
    }
  }
}

Spectrum Spectrum::flat(FrequencyGrid grid, double value, SpectrumUnit unit) {
  std::vector<double> v(grid.size(), value);
  return Spectrum(std::move(grid), std::move(v), unit);
}

Spectrum Spectrum::scaled(double factor) const {
  if (!is_linear(unit_)) throw StructuralError("scaled() needs a linear spectrum");
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return Spectrum(grid_, std::move(v), unit_);
}

bool operator==(const Spectrum& a, const Spectrum& b) {
  return a.unit_ == b.unit_ && a.grid_ == b.grid_ && a.values_ == b.values_;
}

Spectrum to_db(const Spectrum& s) {
  SpectrumUnit out;
  switch (s.unit()) {
    case SpectrumUnit::kRinLinear: out = SpectrumUnit::kRinDb; break;
    case SpectrumUnit::kFreqNoiseLinear: out = SpectrumUnit::kFreqNoiseDb; break;
    default:
      throw StructuralError(fmt::format("no dB form for unit {}", unit_name(s.unit())));
  }
  std::vector<double> v(s.size());
  std::transform(s.values().begin(), s.values().end(), v.begin(), db_from_linear);
  return Spectrum(s.grid(), std::move(v), out);
}

Spectrum to_linear(const Spectrum& s) {
  SpectrumUnit out;
  switch (s.unit()) {
    case SpectrumUnit::kRinDb: out = SpectrumUnit::kRinLinear; break;
    case SpectrumUnit::kFreqNoiseDb: out = SpectrumUnit::kFreqNoiseLinear; break;
    default:
      throw StructuralError(fmt::format("unit {} is already linear", unit_name(s.unit())));
  }
  std::vector<double> v(s.size());
  std::transform(s.values().begin(), s.values().end(), v.begin(), linear_from_db);
  return Spectrum(s.grid(), std::move(v), out);
}

Spectrum uncorrelated_sum(std::span<const Spectrum> spectra) {
  if (spectra.empty()) throw StructuralError("uncorrelated_sum of nothing");
  const Spectrum& first = spectra.front();
  if (!is_linear(first.unit())) {
    throw StructuralError("uncorrelated_sum needs linear power densities");
  }
  std::vector<double> acc(first.values().begin(), first.values().end());
  for (const Spectrum& s : spectra.subspan(1)) {
    if (s.unit() != first.unit()) {
      throw StructuralError(fmt::format("uncorrelated_sum: unit {} vs {}",
                                        unit_name(s.unit()), unit_name(first.unit())));
    }
    if (!(s.grid() == first.grid())) {
      throw StructuralError("uncorrelated_sum: grids differ");
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i];
  }
  return Spectrum(first.grid(), std::move(acc), first.unit());
}

QuadratureVariances::QuadratureVariances(double sx, double sy) : s_x(sx), s_y(sy) {
  if (!(std::isfinite(sx) && std::isfinite(sy)) || !(sx > 0.0) || !(sy > 0.0)) {
    throw DomainError(fmt::format("quadrature variances must be positive, got ({}, {})", sx, sy));
  }
}

QuadratureVariances QuadratureVariances::from_db(double squeezing_db,
                                                 double antisqueezing_db) {
  return {linear_from_db(-squeezing_db), linear_from_db(antisqueezing_db)};
}

}  // namespace sqzloop
