// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <string>
#include <vector>

#include "selfsteer/dsp.hpp"

namespace selfsteer::metrics {

// Wrapped absolute angular error, degrees in [0, 180].
double angular_error(double theta_est_rad, double theta_true_rad);

// Scale-invariant signal-to-distortion ratio in dB, clamped to [-60, 60].
// Throws on length mismatch or an all-zero reference.
double si_sdr(const dsp::Signal& estimate, const dsp::Signal& reference);

struct Quartiles {
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
};

// Linear-interpolation quantiles. Throws on an empty input.
Quartiles quartiles(std::vector<double> values);

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of y = slope*log10(x) + intercept. Requires >= 2 points and
// at least two distinct x values; x must be positive.
LogLinearFit loglinear_fit(const std::vector<std::array<double, 2>>& points);

// Evaluation record of one scene under one method.
struct SceneResult {
  std::string scene_id;
  std::string pipeline_label;  // "unprocessed" | "strong" | "concat" | "ar"
  std::string tracker_label;   // "rw" | "cv" | "-"
  std::vector<double> ae_deg;  // per frame; empty when no estimates exist
  double mae_deg = 0.0;
  double sisdr_in_db = 0.0;
  double sisdr_out_db = 0.0;

  double delta_sisdr_db() const { return sisdr_out_db - sisdr_in_db; }
};

struct GroupSummary {
  std::string pipeline_label;
  std::string tracker_label;
  std::size_t scenes = 0;
  std::size_t frames = 0;
  bool has_ae = false;
  Quartiles ae;     // pooled over frames
  Quartiles sisdr;  // pooled over scenes (output SI-SDR)
};

struct Report {
  std::vector<GroupSummary> groups;

  std::string to_text() const;
};

// Per (pipeline, tracker) group: angular-error quartiles pooled over frames,
// SI-SDR quartiles pooled over scenes. Group order is deterministic.
Report summarize(const std::vector<SceneResult>& batch);

}  // namespace selfsteer::metrics
