// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "selfsteer/dsp.hpp"

namespace selfsteer::geom {

using Vec3 = std::array<double, 3>;

// Microphone positions in meters, relative to the array center.
struct ArrayGeometry {
  std::vector<Vec3> mic_positions;
  std::size_t reference_index = 0;
  double speed_of_sound = 343.0;

  std::size_t channels() const { return mic_positions.size(); }

  // Uniform circular array in the horizontal plane, first mic at 0 degrees.
  // Defaults to the 3-mic, 10 cm diameter layout used throughout.
  static ArrayGeometry circular(std::size_t n_mics = 3, double diameter = 0.10);
};

// Far-field relative transfer function towards azimuth theta. The entry for
// microphone m at bin k is exp(+j*2*pi*f_k*(p_m - p_ref)·u(theta)/c) with
// u(theta) = [cos theta, sin theta, 0]: a source at azimuth theta reaches
// microphones on its side of the array first, so their phases lead the
// reference. Reference-channel entries are exactly 1.
struct SteeringVector {
  std::vector<std::complex<double>> values;  // [channel][bin]
  std::size_t channels = 0;
  std::size_t bins = 0;
  double azimuth = 0.0;

  const std::complex<double>& operator()(std::size_t m, std::size_t k) const {
    return values[m * bins + k];
  }
};

SteeringVector steering_vector(const ArrayGeometry& geom, double azimuth,
                               const dsp::StftConfig& cfg);

// Inclusive bin range used for steered-power evaluation.
struct BinBand {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
};

// Bins whose center frequencies fall inside [lo_hz, hi_hz].
BinBand band_from_hz(const dsp::StftConfig& cfg, double lo_hz, double hi_hz);

// Delay-and-sum steered output power, averaged over the band and normalized
// by the squared channel count:
//   P(theta) = sum_k |sum_m conj(a_mk(theta)) Y_mk|^2 / (M^2 |band|).
// Evaluable at any continuous azimuth. Throws on an empty or out-of-range band.
double das_power(dsp::FrameView frame, const ArrayGeometry& geom, double azimuth,
                 const dsp::StftConfig& cfg, const BinBand& band);

// das_power evaluated on a grid of azimuths. Throws on an empty grid.
std::vector<std::pair<double, double>> das_power_map(dsp::FrameView frame,
                                                     const ArrayGeometry& geom,
                                                     const std::vector<double>& grid,
                                                     const dsp::StftConfig& cfg,
                                                     const BinBand& band);

}  // namespace selfsteer::geom
