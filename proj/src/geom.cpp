// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/geom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "selfsteer/angles.hpp"

namespace selfsteer::geom {

ArrayGeometry ArrayGeometry::circular(std::size_t n_mics, double diameter) {
  if (n_mics < 2) throw std::invalid_argument("geometry: need at least 2 microphones");
  ArrayGeometry g;
  const double radius = diameter / 2.0;
  g.mic_positions.reserve(n_mics);
  for (std::size_t m = 0; m < n_mics; ++m) {
    const double a = kTwoPi * static_cast<double>(m) / static_cast<double>(n_mics);
    g.mic_positions.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return g;
}

namespace {

// Per-microphone phase lead relative to the reference, at 1 Hz:
// 2*pi*(p_m - p_ref)·u(theta)/c. Multiplying by f_k gives the bin phase.
std::vector<double> phase_rates(const ArrayGeometry& geom, double azimuth) {
  if (geom.channels() < 2 || geom.reference_index >= geom.channels())
    throw std::invalid_argument("geometry: invalid microphone configuration");
  const Vec3 u = {std::cos(azimuth), std::sin(azimuth), 0.0};
  const Vec3& ref = geom.mic_positions[geom.reference_index];
  std::vector<double> rate(geom.channels());
  for (std::size_t m = 0; m < geom.channels(); ++m) {
    const Vec3& p = geom.mic_positions[m];
    const double proj = (p[0] - ref[0]) * u[0] + (p[1] - ref[1]) * u[1] +
                        (p[2] - ref[2]) * u[2];
    rate[m] = kTwoPi * proj / geom.speed_of_sound;
  }
  return rate;
}

}  // namespace

SteeringVector steering_vector(const ArrayGeometry& geom, double azimuth,
                               const dsp::StftConfig& cfg) {
  if (!std::isfinite(azimuth))
    throw std::invalid_argument("steering: azimuth must be finite");
  const auto rate = phase_rates(geom, azimuth);
  SteeringVector sv;
  sv.channels = geom.channels();
  sv.bins = cfg.bins();
  sv.azimuth = azimuth;
  sv.values.resize(sv.channels * sv.bins);
  for (std::size_t m = 0; m < sv.channels; ++m) {
    for (std::size_t k = 0; k < sv.bins; ++k) {
      const double phase = rate[m] * cfg.bin_freq_hz(k);
      sv.values[m * sv.bins + k] = {std::cos(phase), std::sin(phase)};
    }
  }
  return sv;
}

BinBand band_from_hz(const dsp::StftConfig& cfg, double lo_hz, double hi_hz) {
  if (lo_hz > hi_hz) throw std::invalid_argument("band: lo_hz > hi_hz");
  const double hz_per_bin = cfg.sample_rate / static_cast<double>(cfg.window_len);
  const auto lo = static_cast<std::size_t>(std::ceil(lo_hz / hz_per_bin));
  auto hi = static_cast<std::size_t>(std::floor(hi_hz / hz_per_bin));
  if (hi >= cfg.bins()) hi = cfg.bins() - 1;
  if (lo > hi) throw std::invalid_argument("band: empty bin range");
  return {lo, hi};
}

double das_power(dsp::FrameView frame, const ArrayGeometry& geom, double azimuth,
                 const dsp::StftConfig& cfg, const BinBand& band) {
  if (band.last < band.first || band.last >= frame.bins)
    throw std::invalid_argument("das_power: empty or out-of-range band");
  if (frame.channels != geom.channels())
    throw std::invalid_argument("das_power: channel count mismatch");
  if (!std::isfinite(azimuth))
    throw std::invalid_argument("das_power: azimuth must be finite");

  const auto rate = phase_rates(geom, azimuth);
  const double hz_per_bin = cfg.sample_rate / static_cast<double>(cfg.window_len);

  double acc = 0.0;
  std::vector<std::complex<double>> rot(frame.channels), step(frame.channels);
  for (std::size_t m = 0; m < frame.channels; ++m) {
    // conj(a_mk) walked along the band with a per-bin phase increment.
    const double phi0 = -rate[m] * hz_per_bin * static_cast<double>(band.first);
    const double dphi = -rate[m] * hz_per_bin;
    rot[m] = {std::cos(phi0), std::sin(phi0)};
    step[m] = {std::cos(dphi), std::sin(dphi)};
  }
  for (std::size_t k = band.first; k <= band.last; ++k) {
    std::complex<double> sum = 0.0;
    for (std::size_t m = 0; m < frame.channels; ++m) {
      sum += rot[m] * frame(m, k);
      rot[m] *= step[m];
    }
    acc += std::norm(sum);
  }
  const double m2 = static_cast<double>(frame.channels * frame.channels);
  return acc / (m2 * static_cast<double>(band.size()));
}

std::vector<std::pair<double, double>> das_power_map(dsp::FrameView frame,
                                                     const ArrayGeometry& geom,
                                                     const std::vector<double>& grid,
                                                     const dsp::StftConfig& cfg,
                                                     const BinBand& band) {
  if (grid.empty()) throw std::invalid_argument("das_power_map: empty grid");
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double az : grid) out.emplace_back(az, das_power(frame, geom, az, cfg, band));
  return out;
}

}  // namespace selfsteer::geom
