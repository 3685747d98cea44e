// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "selfsteer/angles.hpp"
#include "selfsteer/dsp.hpp"
#include "selfsteer/geom.hpp"

namespace selfsteer::scene {

// White-acceleration ("constant velocity") azimuthal motion:
//   theta_{t+1}     = theta_t + dt*theta_dot_t + (dt^2/2)*eps_t
//   theta_dot_{t+1} = theta_dot_t + dt*eps_t,   eps_t ~ N(0, sigma^2).
// Angles stay unwrapped so increments remain Gaussian.
struct MotionParams {
  double dt = 0.016;        // seconds per frame
  double sigma = 0.0;       // perturbation std, rad/s^2
  std::size_t frames = 312; // trajectory length (~5 s at the default hop)
  double theta0 = 0.0;      // rad
  double thetadot0 = 0.0;   // rad/s
};

struct SpeakerSpec {
  double radius = 2.0;          // m, distance to the array center
  double height = 0.0;          // m, above the array plane
  MotionParams motion;
  dsp::Signal source_audio;     // mono, at the STFT sample rate
  double level_offset_db = 0.0; // target-to-interferer ratio (ignored for the target)
};

// Optional first-order reflections off the six walls of a shoebox room.
// Reflections count as noise in the mixture decomposition.
struct ReverbConfig {
  std::array<double, 3> room = {6.0, 5.0, 3.0};        // m
  std::array<double, 3> array_position = {3.0, 2.5, 1.5};
  double reflection_coeff = 0.5;
};

struct SpeakerTruth {
  std::vector<double> theta;  // unwrapped azimuth per frame, rad
  double radius = 0.0;
  double height = 0.0;
  double sigma = 0.0;
};

// Ground truth of one synthetic scene. The mixture decomposes sample-exactly:
//   mixture = target_direct + interferer_image + noise.
struct ScenarioTruth {
  SpeakerTruth target;
  SpeakerTruth interferer;
  dsp::MultichannelSignal target_direct;
  dsp::MultichannelSignal interferer_image;  // direct path + its reflections
  dsp::MultichannelSignal noise;             // isotropic noise + target reflections
  dsp::MultichannelSignal mixture;
  double snr_db = 0.0;
  double sir_db = 0.0;
  std::uint64_t seed = 0;
};

// Perturbation std that makes the expected absolute tangential speed
// |v_t| = (r/dt)|theta_t - theta_{t-1}| reach v_target at step t = frames:
//   sigma = v_target / (dt * r * sqrt((4*frames - 3)/(2*pi))).
// Throws on non-positive inputs.
double calibrate_sigma(double v_target, double r, std::size_t frames, double dt);

// One white-acceleration trajectory of p.frames states.
std::vector<AzimuthState> sample_trajectory(const MotionParams& p, std::mt19937_64& rng);

// Angular random walk, theta_{t+1} = theta_t + N(0, sigma_rw^2). Used as a
// tracker transition option and for motion-mismatch experiments only.
std::vector<double> sample_rw_trajectory(double theta0, double sigma_rw,
                                         std::size_t frames, std::mt19937_64& rng);

// Per-sample time-varying fractional delay line along an arbitrary path.
// positions[t] is the source location (relative to the array center) at frame
// anchor t; positions are interpolated linearly at sample resolution. Each
// microphone applies an 8-tap Hann-windowed sinc at delay |p_src - p_mic|/c
// and gain amp_scale/max(|p_src - p_mic|, 0.1).
dsp::MultichannelSignal spatialize_path(const dsp::Signal& source,
                                        const std::vector<geom::Vec3>& positions,
                                        const geom::ArrayGeometry& geom,
                                        const dsp::StftConfig& cfg,
                                        double amp_scale = 1.0);

// Circular-path convenience wrapper: azimuth trajectory at constant radius
// and height. Throws if the source is shorter than the trajectory needs.
dsp::MultichannelSignal spatialize(const dsp::Signal& source,
                                   const std::vector<double>& trajectory,
                                   double r, double height,
                                   const geom::ArrayGeometry& geom,
                                   const dsp::StftConfig& cfg);

// Spherically isotropic noise: 64 independent white plane waves from
// directions uniform on the sphere, normalized to unit average channel power.
dsp::MultichannelSignal isotropic_noise(std::size_t channels, std::size_t samples,
                                        const geom::ArrayGeometry& geom,
                                        const dsp::StftConfig& cfg,
                                        std::mt19937_64& rng);

// Full two-speaker scene: trajectories, spatialization, interferer leveling,
// optional first-order reflections and isotropic noise at the requested SNR.
// The realized reference-channel SNR matches snr_db and the realized SIR
// matches interferer.level_offset_db. Throws with a reason on constraint
// violations (short sources, initial separation < 10 degrees).
ScenarioTruth mix_scenario(const SpeakerSpec& target, const SpeakerSpec& interferer,
                           double snr_db, const geom::ArrayGeometry& geom,
                           const dsp::StftConfig& cfg, std::mt19937_64& rng,
                           const std::optional<ReverbConfig>& reverb = std::nullopt);

// Samples a scene signal spans: (frames-1)*hop + window_len.
inline std::size_t scene_samples(std::size_t frames, const dsp::StftConfig& cfg) {
  return dsp::signal_length(frames, cfg);
}

// Minimum source length accepted for a trajectory of `frames` frames.
inline std::size_t required_source_samples(std::size_t frames, const dsp::StftConfig& cfg) {
  return frames * cfg.hop + cfg.window_len;
}

}  // namespace selfsteer::scene
