#pragma once

// Units, frequency grids, spectra and power-dB arithmetic.
//
// Quadrature variances are dimensionless with shot noise = 1. Every
// decibel value in this library is a power ratio (10 log10), never an
// amplitude ratio.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace sqzloop {

double db_from_linear(double x);
double linear_from_db(double d);

// Strictly increasing, positive, finite Fourier frequencies in Hz. Copies
// share storage, so spectra derived from one another keep the same grid.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> points_hz);

  std::span<const double> points() const noexcept { return *points_; }
  std::size_t size() const noexcept { return points_->size(); }
  double operator[](std::size_t i) const { return (*points_)[i]; }
  double front() const { return points_->front(); }
  double back() const { return points_->back(); }

  bool same_storage(const FrequencyGrid& other) const noexcept {
    return points_ == other.points_;
  }
  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b);

 private:
  std::shared_ptr<const std::vector<double>> points_;
};

// n log-spaced points from f_min to f_max, both endpoints included exactly.
FrequencyGrid log_spaced_grid(double f_min, double f_max, std::size_t n);

enum class SpectrumUnit {
  kRinLinear,        // RIN^2, 1/Hz
  kRinDb,            // dB/Hz
  kFreqNoiseLinear,  // Hz^2/Hz
  kFreqNoiseDb,      // dB re 1 Hz^2/Hz
  kPhaseNoiseLinear  // rad^2/Hz
};

bool is_linear(SpectrumUnit u) noexcept;
std::string_view unit_name(SpectrumUnit u) noexcept;
SpectrumUnit unit_from_name(std::string_view name);

class Spectrum {
 public:
  Spectrum(FrequencyGrid grid, std::vector<double> values, SpectrumUnit unit);

  // Constant density over the grid.
  static Spectrum flat(FrequencyGrid grid, double value, SpectrumUnit unit);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  SpectrumUnit unit() const noexcept { return unit_; }

  Spectrum scaled(double factor) const;

  friend bool operator==(const Spectrum& a, const Spectrum& b);

 private:
  FrequencyGrid grid_;
  std::vector<double> values_;
  SpectrumUnit unit_;
};

// Explicit unit conversions; the grid is carried over unchanged.
Spectrum to_db(const Spectrum& s);
Spectrum to_linear(const Spectrum& s);

// Pointwise sum of linear power densities of mutually uncorrelated sources.
Spectrum uncorrelated_sum(std::span<const Spectrum> spectra);

struct QuadratureVariances {
  QuadratureVariances(double s_x, double s_y);

  double s_x;
  double s_y;

  static QuadratureVariances vacuum() { return {1.0, 1.0}; }
  // Squeezed/anti-squeezed state from dB below/above shot noise.
  static QuadratureVariances from_db(double squeezing_db,
                                     double antisqueezing_db);
};

}  // namespace sqzloop
