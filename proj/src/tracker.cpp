// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/tracker.hpp"

#include <cmath>
#include <stdexcept>

#include "selfsteer/rng.hpp"

namespace selfsteer::tracker {

namespace {

void normalize(ParticleSet& ps) {
  double sum = 0.0;
  for (double w : ps.weights) sum += w;
  if (sum <= 0.0) throw std::logic_error("particles: non-positive weight sum");
  for (double& w : ps.weights) w /= sum;
}

}  // namespace

ParticleSet init_particles(double theta0, const TrackerConfig& cfg, std::mt19937_64& rng) {
  if (!std::isfinite(theta0))
    throw std::invalid_argument("init_particles: theta0 must be finite");
  if (cfg.n_particles == 0)
    throw std::invalid_argument("init_particles: need at least one particle");

  std::normal_distribution<double> d_theta(theta0, cfg.init_spread_theta);
  std::normal_distribution<double> d_vel(0.0, cfg.init_spread_vel);
  ParticleSet ps;
  ps.states.resize(cfg.n_particles);
  ps.weights.assign(cfg.n_particles, 1.0 / static_cast<double>(cfg.n_particles));
  const bool with_velocity = cfg.transition.kind == TransitionModel::Kind::ConstantVelocity;
  for (auto& s : ps.states) {
    s.theta = cfg.init_spread_theta > 0.0 ? d_theta(rng) : theta0;
    s.theta_dot =
        with_velocity && cfg.init_spread_vel > 0.0 ? d_vel(rng) : 0.0;
  }
  return ps;
}

void predict(ParticleSet& ps, const TransitionModel& model, std::mt19937_64& rng) {
  if (model.kind == TransitionModel::Kind::RandomWalk) {
    std::normal_distribution<double> eta(0.0, model.sigma);
    for (auto& s : ps.states) s.theta += model.sigma > 0.0 ? eta(rng) : 0.0;
  } else {
    std::normal_distribution<double> eps(0.0, model.sigma);
    const double dt = model.dt;
    for (auto& s : ps.states) {
      const double e = model.sigma > 0.0 ? eps(rng) : 0.0;
      s.theta += dt * s.theta_dot + 0.5 * dt * dt * e;
      s.theta_dot += dt * e;
    }
  }
}

bool reweight(ParticleSet& ps, dsp::FrameView frame, const geom::ArrayGeometry& geom,
              const dsp::StftConfig& stft_cfg, const TrackerConfig& cfg) {
  const auto band = geom::band_from_hz(stft_cfg, cfg.band_lo_hz, cfg.band_hi_hz);

  std::vector<double> power(ps.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    power[i] = geom::das_power(frame, geom, ps.states[i].theta, stft_cfg, band);
    mean += power[i];
  }
  mean /= static_cast<double>(ps.size());

  // A silent or flat frame carries no directional information.
  double max_l = 0.0;
  const double floor = cfg.likelihood_floor * mean;
  for (auto& p : power) {
    p = std::max(p, floor);
    max_l = std::max(max_l, p);
  }
  if (max_l <= 0.0 || cfg.likelihood_exponent == 0.0) return false;

  double sum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ps.weights[i] *= std::pow(power[i] / max_l, cfg.likelihood_exponent);
    sum += ps.weights[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    ps.weights.assign(ps.size(), 1.0 / static_cast<double>(ps.size()));
    return true;
  }
  for (double& w : ps.weights) w /= sum;
  return false;
}

double effective_sample_size(const ParticleSet& ps) {
  double sq = 0.0;
  for (double w : ps.weights) sq += w * w;
  if (sq <= 0.0) throw std::logic_error("effective_sample_size: zero weights");
  return 1.0 / sq;
}

bool maybe_resample(ParticleSet& ps, double threshold_ratio, std::mt19937_64& rng) {
  const double n = static_cast<double>(ps.size());
  if (effective_sample_size(ps) >= threshold_ratio * n) return false;

  // Systematic resampling: one uniform offset, N equally spaced pointers.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u0 = unit(rng) / n;
  std::vector<AzimuthState> resampled(ps.size());
  double cdf = ps.weights[0];
  std::size_t i = 0;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const double u = u0 + static_cast<double>(j) / n;
    while (u > cdf && i + 1 < ps.size()) cdf += ps.weights[++i];
    resampled[j] = ps.states[i];
  }
  ps.states = std::move(resampled);
  ps.weights.assign(ps.size(), 1.0 / n);
  return true;
}

EstimateResult estimate(const ParticleSet& ps, double prev_theta) {
  double sin_sum = 0.0, cos_sum = 0.0, vel = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    sin_sum += ps.weights[i] * std::sin(ps.states[i].theta);
    cos_sum += ps.weights[i] * std::cos(ps.states[i].theta);
    vel += ps.weights[i] * ps.states[i].theta_dot;
  }
  if (std::hypot(sin_sum, cos_sum) < 1e-12)
    return {{prev_theta, vel}, true};

  const double wrapped = std::atan2(sin_sum, cos_sum);
  // Re-anchor onto the unwrapped branch nearest the previous estimate.
  const double k = std::round((prev_theta - wrapped) / kTwoPi);
  return {{wrapped + k * kTwoPi, vel}, false};
}

Tracker::Tracker(double theta0, const TrackerConfig& cfg, geom::ArrayGeometry geometry,
                 dsp::StftConfig stft_cfg)
    : cfg_(cfg),
      geom_(std::move(geometry)),
      stft_cfg_(stft_cfg),
      rng_(make_rng(cfg.seed)),
      prev_theta_(theta0) {
  particles_ = init_particles(theta0, cfg_, rng_);
}

StepResult Tracker::step(dsp::FrameView frame) {
  StepResult result;
  predict(particles_, cfg_.transition, rng_);
  result.weights_reset = reweight(particles_, frame, geom_, stft_cfg_, cfg_);
  result.n_eff = effective_sample_size(particles_);  // the resampling trigger value
  result.resampled = maybe_resample(particles_, cfg_.resample_threshold, rng_);
  const auto est = estimate(particles_, prev_theta_);
  result.state = est.state;
  prev_theta_ = est.state.theta;
  return result;
}

}  // namespace selfsteer::tracker
