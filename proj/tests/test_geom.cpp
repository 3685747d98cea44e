// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "selfsteer/angles.hpp"
#include "selfsteer/geom.hpp"
#include "selfsteer/rng.hpp"
#include "support/testutil.hpp"

using namespace selfsteer;

namespace {

const dsp::StftConfig kCfg;
const geom::BinBand kBand = geom::band_from_hz(kCfg, 200.0, 2000.0);

std::vector<double> degree_grid(double step_deg) {
  std::vector<double> grid;
  for (double d = 0.0; d < 360.0; d += step_deg) grid.push_back(deg_to_rad(d));
  return grid;
}

double argmax_azimuth(const std::vector<std::pair<double, double>>& map) {
  double best_az = 0.0, best_p = -1.0;
  for (const auto& [az, p] : map)
    if (p > best_p) {
      best_p = p;
      best_az = az;
    }
  return best_az;
}

}  // namespace

TEST_CASE("default circular array has 3 mics on a 10 cm circle") {
  const auto g = geom::ArrayGeometry::circular();
  REQUIRE(g.channels() == 3);
  for (const auto& p : g.mic_positions) {
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(p[2] == 0.0);
  }
  CHECK(g.mic_positions[0][0] == doctest::Approx(0.05));
  CHECK(g.mic_positions[1][0] == doctest::Approx(0.05 * std::cos(deg_to_rad(120.0))));
}

TEST_CASE("steering vector: reference row is exactly one") {
  const auto g = geom::ArrayGeometry::circular();
  const auto sv = geom::steering_vector(g, 1.234, kCfg);
  for (std::size_t k = 0; k < sv.bins; ++k) {
    CHECK(sv(g.reference_index, k).real() == 1.0);
    CHECK(sv(g.reference_index, k).imag() == 0.0);
  }
  for (std::size_t m = 0; m < sv.channels; ++m)
    for (std::size_t k = 0; k < sv.bins; ++k)
      CHECK(std::abs(sv(m, k)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steering vector is 2*pi periodic") {
  const auto g = geom::ArrayGeometry::circular();
  const auto a = geom::steering_vector(g, 0.7, kCfg);
  const auto b = geom::steering_vector(g, 0.7 + kTwoPi, kCfg);
  for (std::size_t m = 0; m < a.channels; ++m)
    for (std::size_t k = 0; k < a.bins; ++k)
      CHECK(std::abs(a(m, k) - b(m, k)) < 1e-9);
}

TEST_CASE("steering phase matches the explicit projection") {
  // Hand evaluation: phase lead of mic m is 2*pi*f_k*(p_m - p_ref)·u(theta)/c.
  const auto g = geom::ArrayGeometry::circular();
  const double theta = deg_to_rad(30.0);
  const auto sv = geom::steering_vector(g, theta, kCfg);
  const geom::Vec3 u = {std::cos(theta), std::sin(theta), 0.0};
  for (std::size_t m = 0; m < g.channels(); ++m) {
    const double proj = (g.mic_positions[m][0] - g.mic_positions[0][0]) * u[0] +
                        (g.mic_positions[m][1] - g.mic_positions[0][1]) * u[1];
    for (std::size_t k : {1UL, 10UL, 100UL}) {
      const double expected = kTwoPi * kCfg.bin_freq_hz(k) * proj / g.speed_of_sound;
      const std::complex<double> ref(std::cos(expected), std::sin(expected));
      CHECK(std::abs(sv(m, k) - ref) < 1e-12);
    }
  }
}

TEST_CASE("das power of the zero frame is zero everywhere") {
  const auto g = geom::ArrayGeometry::circular();
  const dsp::Frame zero(3, kCfg.bins());
  for (double az : degree_grid(45.0))
    CHECK(geom::das_power(zero.view(), g, az, kCfg, kBand) == 0.0);
}

TEST_CASE("grid argmax recovers a plane wave at 45 degrees") {
  const auto g = geom::ArrayGeometry::circular();
  std::vector<std::complex<double>> unit(kCfg.bins(), {1.0, 0.0});
  const auto frame =
      testutil::plane_wave_frame(g, kCfg, deg_to_rad(45.0), unit, kBand.first, kBand.last);
  const auto map = geom::das_power_map(frame.view(), g, degree_grid(1.0), kCfg, kBand);
  CHECK(rad_to_deg(argmax_azimuth(map)) == doctest::Approx(45.0).epsilon(1e-9));
}

TEST_CASE("das power is invariant to a global phase rotation") {
  const auto g = geom::ArrayGeometry::circular();
  auto rng = make_rng(5);
  const auto spectrum = testutil::random_band_spectrum(kCfg, kBand.first, kBand.last, rng);
  auto frame = testutil::plane_wave_frame(g, kCfg, 0.4, spectrum, kBand.first, kBand.last);
  auto rotated = frame;
  const std::complex<double> phase(std::cos(1.1), std::sin(1.1));
  for (auto& v : rotated.values) v *= phase;
  for (double az : degree_grid(30.0))
    CHECK(geom::das_power(rotated.view(), g, az, kCfg, kBand) ==
          doctest::Approx(geom::das_power(frame.view(), g, az, kCfg, kBand))
              .epsilon(1e-12));
}

TEST_CASE("das power scales with the squared frame amplitude") {
  const auto g = geom::ArrayGeometry::circular();
  auto rng = make_rng(6);
  const auto spectrum = testutil::random_band_spectrum(kCfg, kBand.first, kBand.last, rng);
  auto frame = testutil::plane_wave_frame(g, kCfg, 2.0, spectrum, kBand.first, kBand.last);
  auto scaled = frame;
  for (auto& v : scaled.values) v *= 3.0;
  for (double az : degree_grid(60.0)) {
    const double p = geom::das_power(frame.view(), g, az, kCfg, kBand);
    const double q = geom::das_power(scaled.view(), g, az, kCfg, kBand);
    CHECK(q == doctest::Approx(9.0 * p).epsilon(1e-9));
  }
}

TEST_CASE("rotating the array and the probe angle together changes nothing") {
  auto g = geom::ArrayGeometry::circular();
  auto rng = make_rng(7);
  const auto spectrum = testutil::random_band_spectrum(kCfg, kBand.first, kBand.last, rng);
  const auto frame = testutil::plane_wave_frame(g, kCfg, 0.9, spectrum, kBand.first, kBand.last);

  const double delta = deg_to_rad(25.0);
  geom::ArrayGeometry rotated = g;
  for (auto& p : rotated.mic_positions) {
    const double x = p[0] * std::cos(delta) - p[1] * std::sin(delta);
    const double y = p[0] * std::sin(delta) + p[1] * std::cos(delta);
    p = {x, y, p[2]};
  }
  // The same physical field produced by a rotated source...
  const auto rotated_frame = testutil::plane_wave_frame(rotated, kCfg, 0.9 + delta,
                                                        spectrum, kBand.first, kBand.last);
  for (double az : degree_grid(45.0)) {
    const double p0 = geom::das_power(frame.view(), g, az, kCfg, kBand);
    const double p1 = geom::das_power(rotated_frame.view(), rotated, az + delta, kCfg, kBand);
    CHECK(p1 == doctest::Approx(p0).epsilon(1e-9));
  }
}

TEST_CASE("steered power of a steered frame peaks at the construction azimuth") {
  const auto g = geom::ArrayGeometry::circular();
  auto rng = make_rng(8);
  for (double true_deg : {12.0, 111.0, 222.0, 333.0}) {
    const auto spectrum =
        testutil::random_band_spectrum(kCfg, kBand.first, kBand.last, rng);
    const auto frame = testutil::plane_wave_frame(g, kCfg, deg_to_rad(true_deg), spectrum,
                                                  kBand.first, kBand.last);
    const auto map = geom::das_power_map(frame.view(), g, degree_grid(1.0), kCfg, kBand);
    const double err = std::abs(wrap_pi(argmax_azimuth(map) - deg_to_rad(true_deg)));
    CHECK(rad_to_deg(err) <= 1.0 + 1e-9);
  }
}

TEST_CASE("averaged white-noise frames give an approximately flat power map") {
  const auto g = geom::ArrayGeometry::circular();
  auto rng = make_rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto grid = degree_grid(10.0);
  std::vector<double> avg(grid.size(), 0.0);

  const int n_frames = 1000;
  for (int i = 0; i < n_frames; ++i) {
    dsp::Frame frame(3, kCfg.bins());
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t k = kBand.first; k <= kBand.last; ++k)
        frame(m, k) = {gauss(rng), gauss(rng)};
    const auto map = geom::das_power_map(frame.view(), g, grid, kCfg, kBand);
    for (std::size_t j = 0; j < grid.size(); ++j) avg[j] += map[j].second;
  }
  double lo = avg[0], hi = avg[0];
  for (double v : avg) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("empty band and empty grid are rejected") {
  const auto g = geom::ArrayGeometry::circular();
  const dsp::Frame frame(3, kCfg.bins());
  CHECK_THROWS_AS((void)geom::band_from_hz(kCfg, 3000.0, 2000.0), std::invalid_argument);
  CHECK_THROWS_AS((void)geom::das_power_map(frame.view(), g, {}, kCfg, kBand),
                  std::invalid_argument);
  geom::BinBand bad{300, 400};
  CHECK_THROWS_AS((void)geom::das_power(frame.view(), g, 0.0, kCfg, bad),
                  std::invalid_argument);
}
