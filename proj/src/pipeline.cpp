// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/pipeline.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>

namespace selfsteer::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct OracleData {
  dsp::Spectrogram target;  // stft of the per-channel direct-path target
};

std::optional<OracleData> prepare_oracle(const PipelineConfig& cfg,
                                         const dsp::Spectrogram& spec,
                                         const scene::ScenarioTruth* truth) {
  if (cfg.ssf.kind != ssf::SsfKind::Oracle) return std::nullopt;
  if (!truth || truth->target_direct.empty())
    throw std::invalid_argument("pipeline: oracle requires ground truth");
  OracleData data{dsp::stft(truth->target_direct, spec.config())};
  if (data.target.frames() < spec.frames())
    throw std::invalid_argument("pipeline: ground truth shorter than observation");
  return data;
}

void store_ref_row(dsp::Spectrogram& out, std::size_t t, const dsp::Frame& enhanced,
                   std::size_t ref) {
  const std::size_t row = enhanced.channels == 1 ? 0 : ref;
  for (std::size_t k = 0; k < enhanced.bins; ++k) out.at(0, t, k) = enhanced(row, k);
}

}  // namespace

RunTrace run_concat(const dsp::Spectrogram& spec, const PipelineConfig& cfg,
                    const geom::ArrayGeometry& geom,
                    const scene::ScenarioTruth* truth) {
  if (cfg.mode != PipelineMode::Concatenative)
    throw std::invalid_argument("run_concat: config mode mismatch");

  const auto oracle = prepare_oracle(cfg, spec, truth);
  auto ctx = ssf::make_context(oracle ? &oracle->target : nullptr);
  ssf::SsfParams params = cfg.ssf;
  params.mode = ssf::SsfMode::Miso;

  tracker::Tracker trk(cfg.theta0, cfg.tracker, geom, spec.config());
  RunTrace trace;
  trace.enhanced_ref = dsp::Spectrogram(1, spec.frames(), spec.config());

  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto start = Clock::now();
    const auto frame = spec.frame(t);
    const auto step = trk.step(frame);
    const auto mask =
        ssf::mask_miso(frame, step.state.theta, ctx, params, geom, spec.config());
    const auto enhanced = ssf::apply_mask(frame, mask, geom.reference_index);
    store_ref_row(trace.enhanced_ref, t, enhanced, geom.reference_index);

    trace.theta_est.push_back(step.state.theta);
    trace.n_eff.push_back(step.n_eff);
    trace.resampled.push_back(step.resampled ? 1 : 0);
    if (cfg.record_particles) trace.particle_snapshots.push_back(trk.particles().states);
    trace.wall_ms.push_back(ms_since(start));
  }
  return trace;
}

RunTrace run_ar(const dsp::Spectrogram& spec, const PipelineConfig& cfg,
                const geom::ArrayGeometry& geom,
                const scene::ScenarioTruth* truth) {
  if (cfg.mode != PipelineMode::Autoregressive)
    throw std::invalid_argument("run_ar: config mode mismatch");
  if (cfg.ssf.mode != ssf::SsfMode::Mimo)
    throw std::invalid_argument("run_ar: autoregressive mode requires a MIMO mask");

  const auto oracle = prepare_oracle(cfg, spec, truth);
  auto ctx = ssf::make_context(oracle ? &oracle->target : nullptr);

  tracker::Tracker trk(cfg.theta0, cfg.tracker, geom, spec.config());
  RunTrace trace;
  trace.enhanced_ref = dsp::Spectrogram(1, spec.frames(), spec.config());

  double theta_guidance = cfg.theta0;
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto start = Clock::now();
    const auto frame = spec.frame(t);
    const auto mask =
        ssf::mask_mimo(frame, theta_guidance, ctx, cfg.ssf, geom, spec.config());
    const auto enhanced = ssf::apply_mask(frame, mask, geom.reference_index);
    const auto step = trk.step(enhanced.view());
    theta_guidance = step.state.theta;
    store_ref_row(trace.enhanced_ref, t, enhanced, geom.reference_index);

    trace.theta_est.push_back(step.state.theta);
    trace.n_eff.push_back(step.n_eff);
    trace.resampled.push_back(step.resampled ? 1 : 0);
    if (cfg.record_particles) trace.particle_snapshots.push_back(trk.particles().states);
    trace.wall_ms.push_back(ms_since(start));
  }
  return trace;
}

RunTrace run_strong(const dsp::Spectrogram& spec, const PipelineConfig& cfg,
                    const geom::ArrayGeometry& geom,
                    const scene::ScenarioTruth& truth) {
  if (truth.target.theta.size() < spec.frames())
    throw std::invalid_argument("run_strong: ground-truth trajectory too short");

  const auto oracle = prepare_oracle(cfg, spec, &truth);
  auto ctx = ssf::make_context(oracle ? &oracle->target : nullptr);

  RunTrace trace;
  trace.enhanced_ref = dsp::Spectrogram(1, spec.frames(), spec.config());

  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto start = Clock::now();
    const auto frame = spec.frame(t);
    const double theta_true = truth.target.theta[t];
    const auto mask =
        cfg.ssf.mode == ssf::SsfMode::Mimo
            ? ssf::mask_mimo(frame, theta_true, ctx, cfg.ssf, geom, spec.config())
            : ssf::mask_miso(frame, theta_true, ctx, cfg.ssf, geom, spec.config());
    const auto enhanced = ssf::apply_mask(frame, mask, geom.reference_index);
    store_ref_row(trace.enhanced_ref, t, enhanced, geom.reference_index);
    trace.wall_ms.push_back(ms_since(start));
  }
  return trace;
}

}  // namespace selfsteer::pipeline
