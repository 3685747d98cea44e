// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "selfsteer/rng.hpp"

namespace selfsteer::ssf {

namespace {

constexpr double kOutOfBandMask = 0.5;

bool degrade_bin(const SsfParams& params, std::size_t frame, std::size_t bin) {
  if (params.oracle_degrade <= 0.0) return false;
  if (params.oracle_degrade >= 1.0) return true;
  const std::uint64_t h =
      splitmix64(params.degrade_seed ^ (frame * 0x100000001B3ULL + bin));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < params.oracle_degrade;
}

double oracle_mask_value(dsp::FrameView frame, const dsp::Spectrogram& target,
                         std::size_t t, std::size_t c, std::size_t k) {
  const double s_mag = std::abs(target.at(c, t, k));
  const double v_mag = std::abs(frame(c, k) - target.at(c, t, k));
  const double denom = s_mag + v_mag;
  if (denom <= 0.0) return 0.0;
  return std::clamp(s_mag / denom, 0.0, 1.0);
}

// Steered coherence per bin: |<a_k(theta), Y_k>| / (||a_k|| * ||Y_k||),
// recursively smoothed across frames. Out-of-band entries are left at -1.
std::vector<double> coherence_profile(dsp::FrameView frame, double theta,
                                      SsfContext& ctx, const SsfParams& params,
                                      const geom::ArrayGeometry& geom,
                                      const dsp::StftConfig& cfg) {
  const auto band = geom::band_from_hz(cfg, params.band_lo_hz, params.band_hi_hz);
  const auto sv = geom::steering_vector(geom, theta, cfg);
  const double sqrt_m = std::sqrt(static_cast<double>(frame.channels));

  std::vector<double> c_now(frame.bins, -1.0);
  for (std::size_t k = band.first; k <= band.last && k < frame.bins; ++k) {
    std::complex<double> inner = 0.0;
    double y_norm_sq = 0.0;
    for (std::size_t m = 0; m < frame.channels; ++m) {
      inner += std::conj(sv(m, k)) * frame(m, k);
      y_norm_sq += std::norm(frame(m, k));
    }
    const double denom = sqrt_m * std::sqrt(y_norm_sq);
    c_now[k] = denom > 0.0 ? std::clamp(std::abs(inner) / denom, 0.0, 1.0) : 0.0;
  }

  if (ctx.smoothed.size() != frame.bins) {
    ctx.smoothed.assign(frame.bins, 0.0);
    ctx.has_history = false;
  }
  for (std::size_t k = 0; k < frame.bins; ++k) {
    if (c_now[k] < 0.0) continue;
    ctx.smoothed[k] = ctx.has_history
                          ? params.smoothing * ctx.smoothed[k] +
                                (1.0 - params.smoothing) * c_now[k]
                          : c_now[k];
  }
  ctx.has_history = true;
  return c_now;
}

MaskTensor compute_mask(dsp::FrameView frame, double theta, SsfContext& ctx,
                        const SsfParams& params, const geom::ArrayGeometry& geom,
                        const dsp::StftConfig& cfg, SsfMode mode) {
  const std::size_t rows = mode == SsfMode::Miso ? 1 : frame.channels;
  MaskTensor mask(rows, frame.bins);
  const std::size_t t = ctx.frame_cursor;

  if (params.kind == SsfKind::Oracle) {
    const dsp::Spectrogram* target = ctx.oracle_target;
    if (!target) throw std::invalid_argument("ssf: oracle requires ground truth");
    if (t >= target->frames())
      throw std::out_of_range("ssf: frame cursor past ground-truth length");
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = mode == SsfMode::Miso ? geom.reference_index : r;
      for (std::size_t k = 0; k < frame.bins; ++k)
        mask(r, k) = oracle_mask_value(frame, *target, t, c, k);
    }
  } else {
    const auto c_now = coherence_profile(frame, theta, ctx, params, geom, cfg);
    for (std::size_t k = 0; k < frame.bins; ++k) {
      const double v = c_now[k] < 0.0
                           ? kOutOfBandMask
                           : std::pow(ctx.smoothed[k], params.sharpness);
      for (std::size_t r = 0; r < rows; ++r) mask(r, k) = v;
    }
  }

  if (params.oracle_degrade > 0.0) {
    for (std::size_t k = 0; k < frame.bins; ++k)
      if (degrade_bin(params, t, k))
        for (std::size_t r = 0; r < rows; ++r) mask(r, k) = 1.0;
  }

  ++ctx.frame_cursor;
  return mask;
}

}  // namespace

SsfContext make_context(const dsp::Spectrogram* oracle_target) {
  SsfContext ctx;
  ctx.oracle_target = oracle_target;
  return ctx;
}

MaskTensor mask_miso(dsp::FrameView frame, double theta, SsfContext& ctx,
                     const SsfParams& params, const geom::ArrayGeometry& geom,
                     const dsp::StftConfig& cfg) {
  return compute_mask(frame, theta, ctx, params, geom, cfg, SsfMode::Miso);
}

MaskTensor mask_mimo(dsp::FrameView frame, double theta_prev, SsfContext& ctx,
                     const SsfParams& params, const geom::ArrayGeometry& geom,
                     const dsp::StftConfig& cfg) {
  return compute_mask(frame, theta_prev, ctx, params, geom, cfg, SsfMode::Mimo);
}

dsp::Frame apply_mask(dsp::FrameView frame, const MaskTensor& mask,
                      std::size_t reference_index) {
  if (mask.bins != frame.bins)
    throw std::invalid_argument("apply_mask: bin count mismatch");
  if (mask.channels == 1) {
    if (reference_index >= frame.channels)
      throw std::invalid_argument("apply_mask: bad reference index");
    dsp::Frame out(1, frame.bins);
    for (std::size_t k = 0; k < frame.bins; ++k)
      out(0, k) = mask(0, k) * frame(reference_index, k);
    return out;
  }
  if (mask.channels != frame.channels)
    throw std::invalid_argument("apply_mask: channel count mismatch");
  dsp::Frame out(frame.channels, frame.bins);
  for (std::size_t c = 0; c < frame.channels; ++c)
    for (std::size_t k = 0; k < frame.bins; ++k) out(c, k) = mask(c, k) * frame(c, k);
  return out;
}

}  // namespace selfsteer::ssf
