// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "selfsteer/dsp.hpp"
#include "selfsteer/geom.hpp"
#include "selfsteer/scene.hpp"
#include "selfsteer/ssf.hpp"
#include "selfsteer/tracker.hpp"

namespace selfsteer::pipeline {

enum class PipelineMode { Concatenative, Autoregressive, StrongGuidance };

struct PipelineConfig {
  PipelineMode mode = PipelineMode::Autoregressive;
  tracker::TrackerConfig tracker;
  ssf::SsfParams ssf;
  double theta0 = 0.0;  // initial direction cue (weak guidance)
  bool record_particles = false;
};

// Per-frame record of one pipeline run. The enhanced output is the masked
// reference-channel spectrogram. Estimates are empty under strong guidance.
struct RunTrace {
  std::vector<double> theta_est;  // rad, unwrapped
  std::vector<double> n_eff;
  std::vector<std::uint8_t> resampled;
  std::vector<double> wall_ms;
  dsp::Spectrogram enhanced_ref;  // 1 x frames x bins
  std::vector<std::vector<AzimuthState>> particle_snapshots;

  std::size_t frames() const { return enhanced_ref.frames(); }
};

// Tracker on the raw observations, then the reference-channel mask steered by
// the same-frame estimate. The tracker never sees filter output.
RunTrace run_concat(const dsp::Spectrogram& spec, const PipelineConfig& cfg,
                    const geom::ArrayGeometry& geom,
                    const scene::ScenarioTruth* truth = nullptr);

// Self-steering loop: per-channel mask steered by the previous-frame
// estimate, tracker on the enhanced multichannel output.
RunTrace run_ar(const dsp::Spectrogram& spec, const PipelineConfig& cfg,
                const geom::ArrayGeometry& geom,
                const scene::ScenarioTruth* truth = nullptr);

// Upper-bound baseline: the mask is steered by the ground-truth direction
// every frame; no tracker runs and no estimates are emitted.
RunTrace run_strong(const dsp::Spectrogram& spec, const PipelineConfig& cfg,
                    const geom::ArrayGeometry& geom,
                    const scene::ScenarioTruth& truth);

}  // namespace selfsteer::pipeline
