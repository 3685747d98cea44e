// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace selfsteer::scene {

namespace {

constexpr std::size_t kSincTaps = 8;
constexpr std::size_t kSincHalf = kSincTaps / 2;
constexpr std::size_t kNoisePlaneWaves = 64;
constexpr double kMinDistance = 0.1;

// 8-tap Hann-windowed sinc interpolation kernel around the read position
// base + frac, frac in [0, 1). Taps are normalized to unit sum so constant
// inputs pass at unit gain.
void sinc_kernel(double frac, std::array<double, kSincTaps>& taps) {
  if (frac < 1e-12) {
    taps.fill(0.0);
    taps[kSincHalf - 1] = 1.0;
    return;
  }
  const double s = std::sin(std::numbers::pi * frac);
  double sum = 0.0;
  for (int j = 0; j < static_cast<int>(kSincTaps); ++j) {
    // Offset of tap j relative to the read position; sin(pi*d) alternates
    // sign with the integer part of d.
    const int rel = j - static_cast<int>(kSincHalf - 1);
    const double d = frac - static_cast<double>(rel);
    const double sinc = (rel % 2 == 0 ? s : -s) / (std::numbers::pi * d);
    const double win = 0.5 * (1.0 + std::cos(std::numbers::pi * d / kSincHalf));
    taps[static_cast<std::size_t>(j)] = sinc * win;
    sum += taps[static_cast<std::size_t>(j)];
  }
  for (auto& t : taps) t /= sum;
}

double read_fractional(const dsp::Signal& x, double pos) {
  const double fpos = std::floor(pos);
  const auto base = static_cast<std::ptrdiff_t>(fpos);
  std::array<double, kSincTaps> taps;
  sinc_kernel(pos - fpos, taps);
  double acc = 0.0;
  for (std::size_t j = 0; j < kSincTaps; ++j) {
    const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(j) -
                               static_cast<std::ptrdiff_t>(kSincHalf - 1);
    if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(x.size()))
      acc += taps[j] * x[static_cast<std::size_t>(idx)];
  }
  return acc;
}

double channel_power(const dsp::Signal& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

void add_scaled(dsp::MultichannelSignal& dst, const dsp::MultichannelSignal& src,
                double gain) {
  for (std::size_t c = 0; c < dst.size(); ++c)
    for (std::size_t n = 0; n < dst[c].size(); ++n) dst[c][n] += gain * src[c][n];
}

std::vector<geom::Vec3> circular_positions(const std::vector<double>& trajectory,
                                           double r, double height) {
  std::vector<geom::Vec3> pos(trajectory.size());
  for (std::size_t t = 0; t < trajectory.size(); ++t)
    pos[t] = {r * std::cos(trajectory[t]), r * std::sin(trajectory[t]), height};
  return pos;
}

}  // namespace

double calibrate_sigma(double v_target, double r, std::size_t frames, double dt) {
  if (v_target <= 0.0 || r <= 0.0 || frames == 0 || dt <= 0.0)
    throw std::invalid_argument("calibrate_sigma: inputs must be positive");
  const double steps = static_cast<double>(4 * frames) - 3.0;
  return v_target / (dt * r * std::sqrt(steps / kTwoPi));
}

std::vector<AzimuthState> sample_trajectory(const MotionParams& p, std::mt19937_64& rng) {
  if (p.dt <= 0.0 || p.sigma < 0.0 || p.frames < 2)
    throw std::invalid_argument("sample_trajectory: invalid motion parameters");
  std::normal_distribution<double> eps(0.0, p.sigma);
  std::vector<AzimuthState> traj(p.frames);
  traj[0] = {p.theta0, p.thetadot0};
  for (std::size_t t = 0; t + 1 < p.frames; ++t) {
    const double e = p.sigma > 0.0 ? eps(rng) : 0.0;
    traj[t + 1].theta = traj[t].theta + p.dt * traj[t].theta_dot + 0.5 * p.dt * p.dt * e;
    traj[t + 1].theta_dot = traj[t].theta_dot + p.dt * e;
  }
  return traj;
}

std::vector<double> sample_rw_trajectory(double theta0, double sigma_rw,
                                         std::size_t frames, std::mt19937_64& rng) {
  if (sigma_rw < 0.0)
    throw std::invalid_argument("sample_rw_trajectory: sigma_rw must be >= 0");
  std::normal_distribution<double> eta(0.0, sigma_rw);
  std::vector<double> traj(frames);
  double theta = theta0;
  for (std::size_t t = 0; t < frames; ++t) {
    traj[t] = theta;
    theta += sigma_rw > 0.0 ? eta(rng) : 0.0;
  }
  return traj;
}

dsp::MultichannelSignal spatialize_path(const dsp::Signal& source,
                                        const std::vector<geom::Vec3>& positions,
                                        const geom::ArrayGeometry& geom,
                                        const dsp::StftConfig& cfg,
                                        double amp_scale) {
  if (positions.size() < 2)
    throw std::invalid_argument("spatialize: need at least 2 trajectory anchors");
  if (source.size() < required_source_samples(positions.size(), cfg))
    throw std::invalid_argument("spatialize: source shorter than trajectory needs");

  const std::size_t n_out = scene_samples(positions.size(), cfg);
  const double fs = cfg.sample_rate;
  dsp::MultichannelSignal out(geom.channels(), dsp::Signal(n_out, 0.0));

  for (std::size_t n = 0; n < n_out; ++n) {
    // Linear position interpolation between frame anchors at t*hop.
    const double tf = static_cast<double>(n) / static_cast<double>(cfg.hop);
    const auto t0 = std::min(static_cast<std::size_t>(tf), positions.size() - 1);
    const std::size_t t1 = std::min(t0 + 1, positions.size() - 1);
    const double a = std::min(tf - static_cast<double>(t0), 1.0);
    geom::Vec3 p_src;
    for (int i = 0; i < 3; ++i)
      p_src[i] = (1.0 - a) * positions[t0][i] + a * positions[t1][i];

    for (std::size_t m = 0; m < geom.channels(); ++m) {
      const geom::Vec3& p_mic = geom.mic_positions[m];
      const double dx = p_src[0] - p_mic[0];
      const double dy = p_src[1] - p_mic[1];
      const double dz = p_src[2] - p_mic[2];
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      const double delay = dist / geom.speed_of_sound * fs;
      const double gain = amp_scale / std::max(dist, kMinDistance);
      out[m][n] = gain * read_fractional(source, static_cast<double>(n) - delay);
    }
  }
  return out;
}

dsp::MultichannelSignal spatialize(const dsp::Signal& source,
                                   const std::vector<double>& trajectory,
                                   double r, double height,
                                   const geom::ArrayGeometry& geom,
                                   const dsp::StftConfig& cfg) {
  return spatialize_path(source, circular_positions(trajectory, r, height), geom, cfg);
}

dsp::MultichannelSignal isotropic_noise(std::size_t channels, std::size_t samples,
                                        const geom::ArrayGeometry& geom,
                                        const dsp::StftConfig& cfg,
                                        std::mt19937_64& rng) {
  if (samples == 0) throw std::invalid_argument("isotropic_noise: samples must be > 0");
  if (channels != geom.channels())
    throw std::invalid_argument("isotropic_noise: channel/geometry mismatch");

  // Plane-wave delays across a 10 cm aperture stay within a few samples.
  double max_extent = 0.0;
  for (const auto& p : geom.mic_positions)
    max_extent = std::max(max_extent,
                          std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  const auto margin =
      static_cast<std::size_t>(std::ceil(max_extent / geom.speed_of_sound *
                                         cfg.sample_rate)) + kSincTaps;

  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  dsp::MultichannelSignal out(channels, dsp::Signal(samples, 0.0));
  dsp::Signal wave(samples + 2 * margin);

  for (std::size_t w = 0; w < kNoisePlaneWaves; ++w) {
    // Direction uniform on the sphere.
    const double z = 2.0 * unit(rng) - 1.0;
    const double phi = kTwoPi * unit(rng);
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const geom::Vec3 v = {rxy * std::cos(phi), rxy * std::sin(phi), z};

    for (auto& s : wave) s = white(rng);
    for (std::size_t m = 0; m < channels; ++m) {
      const geom::Vec3& p = geom.mic_positions[m];
      // Microphones on the source side of the array hear the wave earlier.
      const double lead = (p[0] * v[0] + p[1] * v[1] + p[2] * v[2]) /
                          geom.speed_of_sound * cfg.sample_rate;
      const double base = static_cast<double>(margin) + lead;
      const double fbase = std::floor(base);
      std::array<double, kSincTaps> taps;
      sinc_kernel(base - fbase, taps);
      const auto off = static_cast<std::ptrdiff_t>(fbase) -
                       static_cast<std::ptrdiff_t>(kSincHalf - 1);
      for (std::size_t n = 0; n < samples; ++n) {
        double acc = 0.0;
        const double* src = wave.data() + off + static_cast<std::ptrdiff_t>(n);
        for (std::size_t j = 0; j < kSincTaps; ++j) acc += taps[j] * src[j];
        out[m][n] += acc;
      }
    }
  }

  double mean_power = 0.0;
  for (const auto& ch : out) mean_power += channel_power(ch);
  mean_power /= static_cast<double>(channels);
  const double g = mean_power > 0.0 ? 1.0 / std::sqrt(mean_power) : 1.0;
  for (auto& ch : out)
    for (auto& s : ch) s *= g;
  return out;
}

namespace {

// First-order wall reflections: the source path mirrored across each of the
// six walls, attenuated by the reflection coefficient.
dsp::MultichannelSignal reflections(const dsp::Signal& source,
                                    const std::vector<geom::Vec3>& rel_positions,
                                    const geom::ArrayGeometry& geom,
                                    const dsp::StftConfig& cfg,
                                    const ReverbConfig& rv) {
  dsp::MultichannelSignal acc(geom.channels(),
                              dsp::Signal(scene_samples(rel_positions.size(), cfg), 0.0));
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double wall = side == 0 ? 0.0 : rv.room[static_cast<std::size_t>(axis)];
      std::vector<geom::Vec3> image(rel_positions.size());
      for (std::size_t t = 0; t < rel_positions.size(); ++t) {
        geom::Vec3 abs_pos;
        for (int i = 0; i < 3; ++i)
          abs_pos[i] = rel_positions[t][i] + rv.array_position[static_cast<std::size_t>(i)];
        abs_pos[axis] = 2.0 * wall - abs_pos[axis];
        for (int i = 0; i < 3; ++i)
          image[t][i] = abs_pos[i] - rv.array_position[static_cast<std::size_t>(i)];
      }
      add_scaled(acc, spatialize_path(source, image, geom, cfg, rv.reflection_coeff), 1.0);
    }
  }
  return acc;
}

}  // namespace

ScenarioTruth mix_scenario(const SpeakerSpec& target, const SpeakerSpec& interferer,
                           double snr_db, const geom::ArrayGeometry& geom,
                           const dsp::StftConfig& cfg, std::mt19937_64& rng,
                           const std::optional<ReverbConfig>& reverb) {
  if (target.motion.frames != interferer.motion.frames)
    throw std::invalid_argument("mix_scenario: trajectories must have equal frame counts");

  const double sep = std::abs(wrap_pi(target.motion.theta0 - interferer.motion.theta0));
  if (sep < deg_to_rad(10.0))
    throw std::invalid_argument(
        "mix_scenario: initial azimuth separation below 10 degrees");

  const auto tgt_traj = sample_trajectory(target.motion, rng);
  const auto int_traj = sample_trajectory(interferer.motion, rng);
  std::vector<double> tgt_theta(tgt_traj.size()), int_theta(int_traj.size());
  for (std::size_t t = 0; t < tgt_traj.size(); ++t) tgt_theta[t] = tgt_traj[t].theta;
  for (std::size_t t = 0; t < int_traj.size(); ++t) int_theta[t] = int_traj[t].theta;

  const auto tgt_pos = circular_positions(tgt_theta, target.radius, target.height);
  const auto int_pos = circular_positions(int_theta, interferer.radius, interferer.height);

  ScenarioTruth truth;
  truth.target = {tgt_theta, target.radius, target.height, target.motion.sigma};
  truth.interferer = {int_theta, interferer.radius, interferer.height,
                      interferer.motion.sigma};

  truth.target_direct = spatialize_path(target.source_audio, tgt_pos, geom, cfg);
  auto interferer_direct = spatialize_path(interferer.source_audio, int_pos, geom, cfg);

  const std::size_t ref = geom.reference_index;
  const double p_tgt = channel_power(truth.target_direct[ref]);
  const double p_int = channel_power(interferer_direct[ref]);
  if (p_tgt <= 0.0)
    throw std::invalid_argument("mix_scenario: target signal is silent");

  // Interferer gain so the reference-channel target-to-interferer ratio
  // equals level_offset_db.
  const double sir_db = interferer.level_offset_db;
  const double g_int =
      p_int > 0.0 ? std::sqrt(p_tgt / (p_int * std::pow(10.0, sir_db / 10.0))) : 0.0;

  const std::size_t n_out = scene_samples(target.motion.frames, cfg);
  truth.interferer_image.assign(geom.channels(), dsp::Signal(n_out, 0.0));
  add_scaled(truth.interferer_image, interferer_direct, g_int);

  truth.noise.assign(geom.channels(), dsp::Signal(n_out, 0.0));
  if (reverb) {
    add_scaled(truth.noise, reflections(target.source_audio, tgt_pos, geom, cfg, *reverb),
               1.0);
    add_scaled(truth.interferer_image,
               reflections(interferer.source_audio, int_pos, geom, cfg, *reverb), g_int);
  }

  // Isotropic noise scaled for the requested reference-channel SNR.
  auto iso = isotropic_noise(geom.channels(), n_out, geom, cfg, rng);
  const double p_iso = channel_power(iso[ref]);
  double g_noise = 0.0;
  if (std::isfinite(snr_db) && p_iso > 0.0)
    g_noise = std::sqrt(p_tgt / (p_iso * std::pow(10.0, snr_db / 10.0)));
  add_scaled(truth.noise, iso, g_noise);

  truth.mixture.assign(geom.channels(), dsp::Signal(n_out, 0.0));
  add_scaled(truth.mixture, truth.target_direct, 1.0);
  add_scaled(truth.mixture, truth.interferer_image, 1.0);
  add_scaled(truth.mixture, truth.noise, 1.0);

  truth.snr_db = snr_db;
  truth.sir_db = sir_db;
  return truth;
}

}  // namespace selfsteer::scene
