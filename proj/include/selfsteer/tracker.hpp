// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "selfsteer/angles.hpp"
#include "selfsteer/dsp.hpp"
#include "selfsteer/geom.hpp"

namespace selfsteer::tracker {

// Weighted particle approximation of the azimuth posterior. Weights are kept
// normalized to sum 1 after every operation.
struct ParticleSet {
  std::vector<AzimuthState> states;
  std::vector<double> weights;

  std::size_t size() const { return states.size(); }
};

struct TransitionModel {
  enum class Kind { RandomWalk, ConstantVelocity };
  Kind kind = Kind::ConstantVelocity;
  double sigma = 0.0;  // rad/frame (RW) or rad/s^2 (CV)
  double dt = 0.016;   // seconds per frame, CV only

  static TransitionModel random_walk(double sigma_rw) {
    return {Kind::RandomWalk, sigma_rw, 0.0};
  }
  static TransitionModel constant_velocity(double sigma_cv, double dt) {
    return {Kind::ConstantVelocity, sigma_cv, dt};
  }
};

struct TrackerConfig {
  std::size_t n_particles = 50;
  TransitionModel transition = TransitionModel::constant_velocity(3.33, 0.016);
  double band_lo_hz = 200.0;
  double band_hi_hz = 2000.0;
  double likelihood_floor = 0.1;     // q0, fraction of the mean steered power
  double likelihood_exponent = 2.0;  // gamma
  double resample_threshold = 0.5;   // fraction of N
  double init_spread_theta = deg_to_rad(5.0);  // rad
  double init_spread_vel = 0.5;                // rad/s
  std::uint64_t seed = 0;
};

// Particles drawn around theta0 with uniform weights 1/N.
ParticleSet init_particles(double theta0, const TrackerConfig& cfg, std::mt19937_64& rng);

// One transition step per particle; weights untouched.
void predict(ParticleSet& ps, const TransitionModel& model, std::mt19937_64& rng);

// Importance reweighting by floored, exponentiated delay-and-sum steered
// power: w_i <- w_i * max(P_i, q0 * mean(P))^gamma, renormalized. A frame
// with no usable power leaves the weights unchanged. Returns true if the
// weights had to be reset to uniform (underflow).
bool reweight(ParticleSet& ps, dsp::FrameView frame, const geom::ArrayGeometry& geom,
              const dsp::StftConfig& stft_cfg, const TrackerConfig& cfg);

// 1 / sum(w^2).
double effective_sample_size(const ParticleSet& ps);

// Systematic resampling when N_eff < threshold_ratio * N. Returns whether
// resampling happened; afterwards weights are uniform.
bool maybe_resample(ParticleSet& ps, double threshold_ratio, std::mt19937_64& rng);

struct EstimateResult {
  AzimuthState state;
  bool degenerate = false;  // antipodal tie, previous estimate kept
};

// Weighted circular mean, re-anchored to the unwrapped branch nearest
// prev_theta; velocity is the arithmetic weighted mean.
EstimateResult estimate(const ParticleSet& ps, double prev_theta);

struct StepResult {
  AzimuthState state;
  double n_eff = 0.0;
  bool resampled = false;
  bool weights_reset = false;
};

// Bootstrap filter over one stream: predict -> reweight -> conditional
// resampling -> posterior-mean estimate, with instance-owned RNG.
class Tracker {
 public:
  Tracker(double theta0, const TrackerConfig& cfg, geom::ArrayGeometry geometry,
          dsp::StftConfig stft_cfg);

  StepResult step(dsp::FrameView frame);

  const ParticleSet& particles() const { return particles_; }
  double last_estimate() const { return prev_theta_; }

 private:
  TrackerConfig cfg_;
  geom::ArrayGeometry geom_;
  dsp::StftConfig stft_cfg_;
  ParticleSet particles_;
  std::mt19937_64 rng_;
  double prev_theta_;
};

}  // namespace selfsteer::tracker
