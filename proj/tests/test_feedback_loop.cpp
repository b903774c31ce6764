#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "sqzloop/errors.hpp"
#include "sqzloop/feedback_loop.hpp"

using namespace sqzloop;
using doctest::Approx;

namespace {

const DetectionParams kDet(50e-6, 1550e-9);
const auto kOcc = CavityParams::three_times_half_detuned(7.5e6, 0.016);
const auto kImc = CavityParams::half_detuned(6.8e6);
const auto kBs = BeamSplitter::from_reflectivity(0.99);

NoiseFloors flat_floors(double amp_db, double elec_db, double phase_db) {
  const auto grid = log_spaced_grid(1e3, 1e5, 21);
  auto lvl = [](double d) { return std::isinf(d) ? 0.0 : oracle::lin(d); };
  return NoiseFloors(Spectrum::flat(grid, lvl(amp_db), SpectrumUnit::kRinLinear),
                     Spectrum::flat(grid, lvl(elec_db), SpectrumUnit::kRinLinear),
                     Spectrum::flat(grid, lvl(phase_db), SpectrumUnit::kPhaseNoiseLinear));
}

constexpr double kOff = -std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("shot_noise_rsn2") {
  const double rsn = shot_noise_rsn2(kDet);
  CHECK(rsn == Approx(oracle::shot_noise_rsn2(50e-6, 1550e-9)).epsilon(1e-14));
  CHECK(rsn == Approx(5.1263e-15).epsilon(1e-4));
  CHECK(std::abs(db_from_linear(rsn) + 142.9) < 0.05);
  CHECK(db_from_linear(shot_noise_rsn2({100e-6, 1550e-9})) - db_from_linear(rsn) ==
        Approx(-3.0103).epsilon(1e-4));
  CHECK(std::abs(db_from_linear(shot_noise_rsn2({5e-3, 1550e-9})) + 162.9) < 0.05);
  CHECK_THROWS_AS(DetectionParams(0.0, 1550e-9), DomainError);
  CHECK_THROWS_AS(DetectionParams(1e-3, -1.0), DomainError);
}

TEST_CASE("servo_gain") {
  const ServoModel integ(1e4);
  const auto g = servo_gain(integ, 1e4);
  CHECK(std::abs(g) == Approx(1.0).epsilon(1e-14));
  CHECK(std::arg(g) * 180.0 / std::numbers::pi == Approx(-90.0).epsilon(1e-12));
  CHECK(std::abs(servo_gain(integ, 1e5)) == Approx(0.1).epsilon(1e-14));

  const ServoModel second(1e4, 2);
  const ServoModel delayed(1e4, 2, 1e-6);
  const double extra = std::arg(servo_gain(delayed, 1e5) / servo_gain(second, 1e5));
  CHECK(extra * 180.0 / std::numbers::pi == Approx(-36.0).epsilon(1e-10));

  const ServoModel lp(1e4, 1, 0.0, 1e5);
  CHECK(std::abs(servo_gain(lp, 1e5)) == Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(servo_gain(integ, 0.0), DomainError);
  CHECK_THROWS_AS(ServoModel(0.0), DomainError);
  CHECK_THROWS_AS(ServoModel(1e4, 0), DomainError);
  CHECK_THROWS_AS(ServoModel(1e4, 1, -1.0), DomainError);
}

TEST_CASE("loop suppression and singularity") {
  CHECK(loop_suppression(std::complex<double>(0.0), kBs, 1e3) == 1.0);
  // sqrt(t) G = 1 exactly.
  const std::complex<double> g(10.0, 0.0);
  try {
    loop_suppression(g, kBs, 1234.5);
    FAIL("expected a singularity");
  } catch (const SingularityError& e) {
    CHECK(e.frequency_hz() == 1234.5);
    CHECK(std::string(e.what()).find("1234.5") != std::string::npos);
  }
  // A fourth-order integrator drives sqrt(t) G through +1.
  const ServoModel bad(1e4 * std::pow(10.0, 0.25), 4);
  CHECK_THROWS_AS(loop_suppression(bad, kBs, 1e4), SingularityError);
  // Double integrator whose delay turns G positive near 100 kHz.
  const auto warn = amplification_frequencies(ServoModel(1e4, 2, 5e-6), kBs, log_spaced_grid(1e3, 1e5, 11));
  CHECK_FALSE(warn.empty());
  CHECK(amplification_frequencies(ServoModel(1e7), kBs, log_spaced_grid(1e3, 1e5, 11)).empty());
}

TEST_CASE("noise floors lookup") {
  const auto floors = flat_floors(-157, -160, -90);
  CHECK(floors.at(1e3).rin_x2 == Approx(2e-16).epsilon(1e-3));
  CHECK(floors.at(3.3e3).electronic == Approx(1e-16).epsilon(1e-12));
  CHECK_THROWS_AS(floors.at(10.0), DomainError);

  const auto grid = log_spaced_grid(1e3, 1e5, 3);
  const NoiseFloors sloped(Spectrum(grid, {1e-8, 1e-10, 1e-12}, SpectrumUnit::kRinLinear),
                           Spectrum::flat(grid, 0.0, SpectrumUnit::kRinLinear),
                           Spectrum::flat(grid, 1.0, SpectrumUnit::kPhaseNoiseLinear));
  CHECK(sloped.at(std::sqrt(1e3 * 1e4)).rin_x2 == Approx(1e-9).epsilon(1e-10));

  CHECK_THROWS_AS(NoiseFloors(Spectrum::flat(grid, 1.0, SpectrumUnit::kRinLinear),
                              Spectrum::flat(grid, 1.0, SpectrumUnit::kRinLinear),
                              Spectrum::flat(grid, 1.0, SpectrumUnit::kRinLinear)),
                  StructuralError);
}

TEST_CASE("inloop_rin2") {
  const double rsn = shot_noise_rsn2(kDet);
  const auto quiet = flat_floors(kOff, kOff, kOff);
  CHECK(inloop_rin2(quiet, kOcc, kDet, 1.0, 8e3) == rsn);

  const double sq = inloop_rin2(quiet, kOcc, kDet, 0.155, 8e3);
  CHECK(db_from_linear(sq) == Approx(-150.9986).epsilon(1e-6));
  CHECK(std::abs(db_from_linear(sq) + 151.0) < 0.05);

  // Amplitude floor at -157 dB/Hz; phase term negligible (theta^2 ~ 1e-8).
  const auto paper = flat_floors(-157, -160, -200);
  const double with_floor = inloop_rin2(paper, kOcc, kDet, 0.155, 8e3);
  CHECK(db_from_linear(with_floor) == Approx(-150.0257).epsilon(1e-5));
  CHECK(std::abs(db_from_linear(with_floor) + 149.9) < 0.2);

  const auto loud = flat_floors(kOff, kOff, -100);
  const double theta = rotation_angle(kOcc, 5e4);
  CHECK(inloop_rin2(loud, kOcc, kDet, 1.0, 5e4) == Approx(rsn + theta * theta * 1e-10).epsilon(1e-14));
  CHECK_THROWS_AS(inloop_rin2(quiet, kOcc, kDet, 0.0, 8e3), DomainError);
}

TEST_CASE("outofloop_rin2_open") {
  const auto amp_only = flat_floors(-157, kOff, kOff);
  CHECK(outofloop_rin2_open(amp_only, kImc, 2e4) == amp_only.at(2e4).rin_x2);

  const FloorLevels phase_only{0.0, 0.0, 1e-10};
  CHECK(outofloop_rin2_open(phase_only, kImc, 1e-9) < 1e-30);
  CHECK(outofloop_rin2_open(phase_only, kImc, 4e4) / outofloop_rin2_open(phase_only, kImc, 2e4) ==
        Approx(4.0).epsilon(1e-14));
}

TEST_CASE("outofloop_rin2_closed") {
  const double rsn = shot_noise_rsn2(kDet);
  const FloorLevels floors{2e-16, 1e-16, 1e-10};
  const double f = 2e4;
  const double th2 = std::pow(rotation_angle(kImc, f), 2);

  SUBCASE("loop off") {
    const double got = outofloop_rin2_closed(floors, kImc, 0.0, kBs, kDet, 1.0, f);
    CHECK(got == Approx(outofloop_rin2_open(floors, kImc, f) + th2 * rsn / 0.99).epsilon(1e-14));
  }
  SUBCASE("infinite-gain limit") {
    const double got = outofloop_rin2_closed(floors, kImc, std::complex<double>(0.0, -1e12), kBs,
                                             kDet, 0.155, f);
    CHECK(got == Approx(floors.rin_x2 + th2 * rsn * 0.155 / 0.99).epsilon(1e-12));
  }
  SUBCASE("squeezing ratio of the readout term") {
    const FloorLevels quiet{};
    const ServoModel servo(1e8);
    const double sq = outofloop_rin2_closed(quiet, kImc, servo_gain(servo, f), kBs, kDet, 0.155, f);
    const double cl = outofloop_rin2_closed(quiet, kImc, servo_gain(servo, f), kBs, kDet, 1.0, f);
    CHECK(db_from_linear(cl) - db_from_linear(sq) == Approx(8.097).epsilon(1e-3));
    CHECK(std::abs(db_from_linear(cl) - db_from_linear(sq) - 8.1) < 0.01);
  }
  SUBCASE("servo overload matches the gain overload") {
    const auto grid_floors = flat_floors(-157, -160, -100);
    const ServoModel servo(2e7);
    CHECK(outofloop_rin2_closed(grid_floors, kImc, servo, kBs, kDet, 0.3, f) ==
          outofloop_rin2_closed(grid_floors.at(f), kImc, servo_gain(servo, f), kBs, kDet, 0.3, f));
  }
  SUBCASE("singular loop") {
    CHECK_THROWS_AS(outofloop_rin2_closed(floors, kImc, std::complex<double>(10.0, 0.0), kBs, kDet, 1.0, f),
                    SingularityError);
  }
}

TEST_CASE("frequency noise conversion") {
  const auto grid = FrequencyGrid({1e3, 2e3, 5e3});
  const auto phase = Spectrum::flat(grid, 1.0, SpectrumUnit::kPhaseNoiseLinear);
  const auto nu = freq_noise_from_phase(phase);
  CHECK(nu.unit() == SpectrumUnit::kFreqNoiseLinear);
  CHECK(nu[0] == 1e6);

  std::vector<double> v;
  for (double f : grid.points()) v.push_back(3.0 / (f * f));
  const auto white = freq_noise_from_phase(Spectrum(grid, v, SpectrumUnit::kPhaseNoiseLinear));
  for (double x : white.values()) CHECK(x == Approx(3.0).epsilon(1e-14));

  const auto back = phase_from_freq_noise(nu);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(back[i] == Approx(phase[i]).epsilon(1e-12));

  CHECK_THROWS_AS(freq_noise_from_phase(nu), StructuralError);
  CHECK_THROWS_AS(phase_from_freq_noise(phase), StructuralError);
}

TEST_CASE("cross_cavity_normalization") {
  const auto occ_matched = CavityParams::three_times_half_detuned(6.8e5);
  CHECK(cross_cavity_normalization(occ_matched, kImc) == Approx(1.0).epsilon(1e-14));
  const double n = cross_cavity_normalization(kOcc, kImc);
  CHECK(n == Approx(8.22044e-3).epsilon(1e-5));
  CHECK(db_from_linear(n) == Approx(-20.851).epsilon(1e-4));
  CHECK(cross_cavity_normalization(kOcc, kOcc) == Approx(1.0).epsilon(1e-14));
  CHECK(cross_cavity_normalization(kImc, kImc) == Approx(1.0).epsilon(1e-14));
}
