// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <vector>

#include "selfsteer/dsp.hpp"
#include "selfsteer/geom.hpp"

namespace selfsteer::ssf {

// Real-valued time-frequency mask: one row for a reference-channel (MISO)
// mask, channel count rows for a per-channel (MIMO) mask. Values in [0, 1].
struct MaskTensor {
  std::size_t channels = 0;
  std::size_t bins = 0;
  std::vector<double> values;

  MaskTensor() = default;
  MaskTensor(std::size_t n_channels, std::size_t n_bins, double fill = 0.0)
      : channels(n_channels), bins(n_bins), values(n_channels * n_bins, fill) {}

  double& operator()(std::size_t c, std::size_t k) { return values[c * bins + k]; }
  double operator()(std::size_t c, std::size_t k) const { return values[c * bins + k]; }
};

enum class SsfMode { Miso, Mimo };
enum class SsfKind {
  Oracle,     // magnitude-ratio mask from the known direct-path target
  Coherence,  // steered phase-coherence mask, direction-conditioned
};

struct SsfParams {
  SsfMode mode = SsfMode::Mimo;
  SsfKind kind = SsfKind::Coherence;
  double sharpness = 2.0;       // beta, coherence exponent
  double smoothing = 0.6;       // alpha, recursive coherence smoothing
  double oracle_degrade = 0.0;  // fraction of mask bins passed through as 1
  double band_lo_hz = 200.0;
  double band_hi_hz = 2000.0;
  std::uint64_t degrade_seed = 0;
};

// Per-stream state carried across frames: the frame cursor into the oracle's
// ground-truth spectrogram, and the recursive coherence accumulator.
struct SsfContext {
  std::size_t frame_cursor = 0;
  std::vector<double> smoothed;
  bool has_history = false;
  const dsp::Spectrogram* oracle_target = nullptr;  // not owned
};

// oracle_target must outlive the context; required for SsfKind::Oracle.
SsfContext make_context(const dsp::Spectrogram* oracle_target = nullptr);

// Single-channel mask for the reference channel, conditioned on the
// current-frame direction cue. Advances ctx by one frame.
MaskTensor mask_miso(dsp::FrameView frame, double theta, SsfContext& ctx,
                     const SsfParams& params, const geom::ArrayGeometry& geom,
                     const dsp::StftConfig& cfg);

// Per-channel mask conditioned on the previous-frame direction cue
// (the autoregressive loop only has last frame's estimate at mask time).
MaskTensor mask_mimo(dsp::FrameView frame, double theta_prev, SsfContext& ctx,
                     const SsfParams& params, const geom::ArrayGeometry& geom,
                     const dsp::StftConfig& cfg);

// Element-wise product. A one-row mask extracts only the reference channel;
// a full mask preserves all channels. Throws on shape mismatch.
dsp::Frame apply_mask(dsp::FrameView frame, const MaskTensor& mask,
                      std::size_t reference_index = 0);

}  // namespace selfsteer::ssf
