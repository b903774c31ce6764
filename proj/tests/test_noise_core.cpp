#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "sqzloop/errors.hpp"
#include "sqzloop/noise_core.hpp"

using namespace sqzloop;
using doctest::Approx;

TEST_CASE("db_from_linear") {
  CHECK(db_from_linear(1.0) == 0.0);
  CHECK(db_from_linear(10.0) == Approx(10.0).epsilon(1e-15));
  CHECK(std::abs(db_from_linear(5.126e-15) + 142.9) < 0.05);

  CHECK_THROWS_AS(db_from_linear(0.0), DomainError);
  CHECK_THROWS_AS(db_from_linear(-1.0), DomainError);
  CHECK_THROWS_AS(db_from_linear(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(db_from_linear(std::nan("")), DomainError);
}

TEST_CASE("linear_from_db") {
  CHECK(linear_from_db(0.0) == 1.0);
  CHECK(std::abs(linear_from_db(-3.0103) - 0.5) < 1e-5);
  CHECK(std::abs(linear_from_db(-10.6) - 0.0871) < 1e-4);
  CHECK_THROWS_AS(linear_from_db(std::nan("")), DomainError);
  CHECK_THROWS_AS(linear_from_db(-std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("log_spaced_grid") {
  const auto g2 = log_spaced_grid(1.0, 10.0, 2);
  REQUIRE(g2.size() == 2);
  CHECK(g2[0] == 1.0);
  CHECK(g2[1] == 10.0);

  const auto g3 = log_spaced_grid(1e3, 1e5, 3);
  CHECK(g3[0] == 1e3);
  CHECK(g3[1] == Approx(1e4).epsilon(1e-14));
  CHECK(g3[2] == 1e5);

  const auto g = log_spaced_grid(1e3, 1e5, 201);
  const double ratio = std::pow(100.0, 1.0 / 200.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == Approx(ratio).epsilon(1e-12));

  CHECK_THROWS_AS(log_spaced_grid(0.0, 10.0, 5), DomainError);
  CHECK_THROWS_AS(log_spaced_grid(10.0, 10.0, 5), DomainError);
  CHECK_THROWS_AS(log_spaced_grid(1.0, 10.0, 1), DomainError);
}

TEST_CASE("frequency grid invariants") {
  CHECK_THROWS_AS(FrequencyGrid({}), DomainError);
  CHECK_THROWS_AS(FrequencyGrid({1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(FrequencyGrid({2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(FrequencyGrid({-1.0, 1.0}), DomainError);
  CHECK_NOTHROW(FrequencyGrid({1.0}));
}

TEST_CASE("spectrum construction and conversion") {
  const auto grid = log_spaced_grid(1e3, 1e5, 5);
  CHECK_THROWS_AS(Spectrum(grid, {1, 2, 3}, SpectrumUnit::kRinLinear), StructuralError);
  CHECK_THROWS_AS(Spectrum(grid, {1, 2, -3, 4, 5}, SpectrumUnit::kRinLinear), DomainError);
  CHECK_NOTHROW(Spectrum(grid, {-1, -2, -3, -4, -5}, SpectrumUnit::kRinDb));

  const auto s = Spectrum::flat(grid, 2e-16, SpectrumUnit::kRinLinear);
  const auto d = to_db(s);
  CHECK(d.unit() == SpectrumUnit::kRinDb);
  CHECK(d.grid().same_storage(s.grid()));
  CHECK(d[0] == Approx(-156.9897).epsilon(1e-6));
  const auto back = to_linear(d);
  CHECK(back.grid().same_storage(s.grid()));
  CHECK(back[3] == Approx(2e-16).epsilon(1e-12));

  CHECK_THROWS_AS(to_db(Spectrum::flat(grid, 1.0, SpectrumUnit::kPhaseNoiseLinear)), StructuralError);
  CHECK_THROWS_AS(to_linear(s), StructuralError);
  CHECK(unit_from_name(unit_name(SpectrumUnit::kFreqNoiseDb)) == SpectrumUnit::kFreqNoiseDb);
}

TEST_CASE("uncorrelated_sum") {
  const auto grid = log_spaced_grid(1e3, 1e5, 4);
  const auto s = Spectrum::flat(grid, 3e-16, SpectrumUnit::kRinLinear);

  SUBCASE("single element") {
    const std::vector<Spectrum> one = {s};
    CHECK(uncorrelated_sum(one) == s);
  }
  SUBCASE("doubling adds 3.0103 dB") {
    const std::vector<Spectrum> two = {s, s};
    const auto sum = uncorrelated_sum(two);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(db_from_linear(sum[i]) - db_from_linear(s[i]) == Approx(3.0103).epsilon(1e-5));
    }
  }
  SUBCASE("squeezed level plus summed coupling") {
    // Brute-force: 10^(-15.1) + 10^(-15.26) -> -148.716 dB.
    const std::vector<Spectrum> parts = {
        Spectrum::flat(grid, oracle::lin(-151.0), SpectrumUnit::kRinLinear),
        Spectrum::flat(grid, oracle::lin(-152.6), SpectrumUnit::kRinLinear)};
    const double got = db_from_linear(uncorrelated_sum(parts)[0]);
    CHECK(got == Approx(-148.7164).epsilon(1e-6));
    CHECK(std::abs(got + 148.7) < 0.3);
  }
  SUBCASE("mismatches") {
    const auto other_grid = log_spaced_grid(1e3, 1e5, 5);
    const std::vector<Spectrum> grids = {s, Spectrum::flat(other_grid, 1.0, SpectrumUnit::kRinLinear)};
    CHECK_THROWS_AS(uncorrelated_sum(grids), StructuralError);
    const std::vector<Spectrum> units = {s, Spectrum::flat(grid, 1.0, SpectrumUnit::kFreqNoiseLinear)};
    CHECK_THROWS_AS(uncorrelated_sum(units), StructuralError);
    const std::vector<Spectrum> db = {to_db(s)};
    CHECK_THROWS_AS(uncorrelated_sum(db), StructuralError);
    CHECK_THROWS_AS(uncorrelated_sum(std::span<const Spectrum>{}), StructuralError);
  }
}

TEST_CASE("quadrature variances") {
  CHECK_THROWS_AS(QuadratureVariances(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(QuadratureVariances(1.0, -1.0), DomainError);
  const auto v = QuadratureVariances::from_db(10.6, 17.0);
  CHECK(v.s_x == Approx(0.08709636).epsilon(1e-7));
  CHECK(v.s_y == Approx(50.118723).epsilon(1e-7));
}
