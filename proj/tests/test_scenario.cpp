#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sqzloop/errors.hpp"
#include "sqzloop/scenario.hpp"

using namespace sqzloop;
using doctest::Approx;

namespace {

const ScenarioResult& paper_result() {
  static const ScenarioResult r = run_scenario(default_config());
  return r;
}

double db_at(const Spectrum& s, std::size_t i) { return db_from_linear(s[i]); }

std::size_t nearest(const FrequencyGrid& g, double f) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(std::log(g[i] / f)) < std::abs(std::log(g[best] / f))) best = i;
  }
  return best;
}

}  // namespace

TEST_CASE("synthesize_floor") {
  const auto grid = log_spaced_grid(1e3, 1e5, 11);
  const auto amp = synthesize_floor(FlatFloor{-157.0}, grid, SpectrumUnit::kRinLinear);
  for (double v : amp.values()) CHECK(v == Approx(1.9953e-16).epsilon(1e-4));
  const auto elec = synthesize_floor(FlatFloor{-160.0}, grid, SpectrumUnit::kRinLinear);
  for (double v : elec.values()) CHECK(v == Approx(1e-16).epsilon(1e-12));

  const auto pl = synthesize_floor(PowerLawFloor{{{1e3, -2.0, -100.0}}}, grid,
                                   SpectrumUnit::kPhaseNoiseLinear);
  CHECK(db_from_linear(pl[5]) == Approx(-120.0).epsilon(1e-12));
  CHECK(db_from_linear(pl[10]) == Approx(-140.0).epsilon(1e-12));

  CHECK_THROWS_AS(synthesize_floor(PowerLawFloor{{{1e3, -2, -100}, {1e4, -1, -125}}}, grid,
                                   SpectrumUnit::kRinLinear),
                  ValidationError);
  CHECK_THROWS_AS(synthesize_floor(FlatFloor{-157.0}, grid, SpectrumUnit::kRinDb), StructuralError);
}

TEST_CASE("paper-default trace family") {
  const auto& r = paper_result();
  const auto& t = r.traces;
  const auto& g = t.grid;
  REQUIRE(g.size() == 201);
  CHECK(g.front() == 1e3);
  CHECK(g.back() == 1e5);
  for (std::size_t k = 0; k < kTraceCount; ++k) {
    CHECK(t.traces[k].name == std::string("trace_") + static_cast<char>('a' + k));
    CHECK(t.traces[k].spectrum.grid().same_storage(g));
  }
  CHECK(t['a'].unit() == SpectrumUnit::kFreqNoiseLinear);
  CHECK(t['h'].unit() == SpectrumUnit::kRinLinear);

  SUBCASE("b sits at the shot-noise level") {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(db_at(t['b'], i) + 142.9) < 0.05);
    CHECK(db_at(t['b'], 0) == Approx(oracle::db(oracle::shot_noise_rsn2(50e-6, 1550e-9) / 0.99)));
  }
  SUBCASE("c is 5 dB below b over 5-60 kHz") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] < 5e3 || g[i] > 6e4) continue;
      CHECK(std::abs(db_at(t['b'], i) - db_at(t['c'], i) - 5.0) < 0.5);
    }
  }
  SUBCASE("d is 8.1 dB below b") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(db_at(t['b'], i) - db_at(t['d'], i) - 8.1) < 0.1);
    }
  }
  SUBCASE("h about 5.8 dB below b at 8 kHz") {
    const auto i = nearest(g, 8e3);
    CHECK(std::abs(db_at(t['b'], i) - db_at(t['h'], i) - 5.8) < 0.3);
  }
  SUBCASE("h is the pointwise sum of d, e, f, g") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(t['h'][i] == Approx(t['d'][i] + t['e'][i] + t['f'][i] + t['g'][i]).epsilon(1e-15));
    }
  }
  SUBCASE("c never beats h") {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(t['c'][i] >= t['h'][i]);
  }
  SUBCASE("f and g are the floors") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(db_at(t['f'], i) == Approx(-157.0));
      CHECK(db_at(t['g'], i) == Approx(-160.0));
    }
  }
  SUBCASE("a is white frequency noise") {
    for (double v : t['a'].values()) CHECK(v == Approx(1e-9 * 1e6).epsilon(1e-12));
  }
}

TEST_CASE("paper-default anchors and budget") {
  const auto& r = paper_result();
  const auto& a = r.anchors;
  CHECK(std::abs(a.shot_noise_db + 142.9) < 0.05);
  CHECK(std::abs(a.amplitude_gap_db + 14.1) < 0.05);
  CHECK(a.cross_cavity_normalization_db == Approx(-20.851).epsilon(1e-4));
  CHECK(a.unity_gain_calibrated);
  CHECK(a.coupling_inloop_residual + a.coupling_amplitude + a.coupling_electronic ==
        Approx(0.106).epsilon(1e-9));
  CHECK(r.amplification_warnings.empty());

  CHECK(r.budget.stages.after_loss_and_phase_db == Approx(8.1));
  CHECK(std::abs(r.budget.stages.after_coupling_db - 5.84) < 0.15);
  CHECK(r.budget.stages.final_db == Approx(4.9355645).epsilon(1e-7));
  CHECK_FALSE(r.budget.discrepancies.empty());
}

TEST_CASE("no squeezing makes c equal b") {
  auto c = parse_config("squeezer:\n  squeezing_db: 0\n  antisqueezing_db: 0\n");
  const auto r = run_scenario(c);
  for (std::size_t i = 0; i < r.traces.grid.size(); ++i) {
    CHECK(std::abs(db_at(r.traces['c'], i) - db_at(r.traces['b'], i)) < 1e-9);
  }
}

TEST_CASE("explicit servo and singularities") {
  auto c = parse_config("servo:\n  unity_gain_frequency_hz: 1e5\n  integrator_order: 1\n");
  const auto r = run_scenario(c);
  CHECK_FALSE(r.anchors.unity_gain_calibrated);
  CHECK(r.anchors.unity_gain_frequency_hz == 1e5);

  // Fourth-order integrator makes sqrt(t) G = 1 at 10 kHz.
  auto bad = parse_config("grid: {f_min_hz: 1000, f_max_hz: 100000, points: 3}\n"
                          "servo:\n  unity_gain_frequency_hz: 17782.794100389228\n  integrator_order: 4\n");
  try {
    run_scenario(bad);
    FAIL("expected a singularity");
  } catch (const SingularityError& e) {
    CHECK(e.frequency_hz() == Approx(1e4));
  }
}

TEST_CASE("calibration failures are reported") {
  auto loud = parse_config("floors:\n  residual_amplitude_rin: {flat_db: -140}\n");
  CHECK_THROWS_AS(calibrate_unity_gain(loud), ValidationError);
  auto quiet = parse_config("floors:\n  free_running_phase: {flat_db: -200}\n");
  CHECK_THROWS_AS(calibrate_unity_gain(quiet), ValidationError);
}

TEST_CASE("run_scenario is deterministic") {
  const auto c = default_config();
  CHECK(run_scenario(c).traces == run_scenario(c).traces);
}
