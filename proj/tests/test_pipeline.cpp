// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "selfsteer/metrics.hpp"
#include "selfsteer/pipeline.hpp"
#include "selfsteer/rng.hpp"
#include "support/testutil.hpp"

using namespace selfsteer;

namespace {

const dsp::StftConfig kCfg;
const auto kGeom = geom::ArrayGeometry::circular();

scene::SpeakerSpec speaker(double theta0, double r, double sigma, std::size_t frames,
                           std::uint64_t seed) {
  scene::SpeakerSpec s;
  s.radius = r;
  s.height = 0.3;
  s.motion = {kCfg.frame_dt(), sigma, frames, theta0, 0.0};
  s.source_audio = testutil::speechlike(scene::required_source_samples(frames, kCfg),
                                        kCfg.sample_rate, seed);
  return s;
}

// Static target, silent interferer, light noise.
scene::ScenarioTruth single_speaker_scene(std::size_t frames, std::uint64_t seed) {
  auto target = speaker(0.8, 2.0, 0.0, frames, seed);
  auto interferer = speaker(2.8, 2.0, 0.0, frames, seed + 1);
  interferer.source_audio.assign(interferer.source_audio.size(), 0.0);
  auto rng = make_rng(seed + 2);
  return scene::mix_scenario(target, interferer, 30.0, kGeom, kCfg, rng);
}

// Standard moving two-speaker scene.
scene::ScenarioTruth two_speaker_scene(std::size_t frames, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta_t = kTwoPi * unit(rng);
  double theta_i = kTwoPi * unit(rng);
  while (std::abs(wrap_pi(theta_t - theta_i)) < deg_to_rad(10.0))
    theta_i = kTwoPi * unit(rng);
  const double r_t = 1.0 + 2.0 * unit(rng);
  const double r_i = 1.0 + 2.0 * unit(rng);

  auto target = speaker(theta_t, r_t,
                        scene::calibrate_sigma(1.5, r_t, frames, kCfg.frame_dt()),
                        frames, seed * 31 + 1);
  auto interferer = speaker(theta_i, r_i,
                            scene::calibrate_sigma(1.5, r_i, frames, kCfg.frame_dt()),
                            frames, seed * 31 + 2);
  interferer.level_offset_db = -5.0 + 10.0 * unit(rng);
  const double snr = 20.0 + 10.0 * unit(rng);
  return scene::mix_scenario(target, interferer, snr, kGeom, kCfg, rng);
}

pipeline::PipelineConfig base_config(pipeline::PipelineMode mode, ssf::SsfKind kind,
                                     double theta0, std::uint64_t seed) {
  pipeline::PipelineConfig cfg;
  cfg.mode = mode;
  cfg.ssf.kind = kind;
  cfg.ssf.mode = mode == pipeline::PipelineMode::Concatenative ? ssf::SsfMode::Miso
                                                               : ssf::SsfMode::Mimo;
  cfg.theta0 = theta0;
  cfg.tracker.seed = seed;
  return cfg;
}

double median_ae(const pipeline::RunTrace& trace, const std::vector<double>& truth) {
  std::vector<double> ae;
  for (std::size_t t = 0; t < trace.theta_est.size(); ++t)
    ae.push_back(metrics::angular_error(trace.theta_est[t], truth[t]));
  std::sort(ae.begin(), ae.end());
  return ae[ae.size() / 2];
}

double sisdr_vs_target(const dsp::Spectrogram& enhanced_ref,
                       const scene::ScenarioTruth& truth) {
  const auto out = dsp::istft(enhanced_ref)[0];
  const auto margin = static_cast<std::ptrdiff_t>(kCfg.window_len);
  const dsp::Signal out_i(out.begin() + margin, out.end() - margin);
  const dsp::Signal tgt_i(truth.target_direct[0].begin() + margin,
                          truth.target_direct[0].begin() +
                              static_cast<std::ptrdiff_t>(out.size()) - margin);
  return metrics::si_sdr(out_i, tgt_i);
}

double sisdr_input(const scene::ScenarioTruth& truth, std::size_t n) {
  const auto margin = static_cast<std::ptrdiff_t>(kCfg.window_len);
  const dsp::Signal mix_i(truth.mixture[0].begin() + margin,
                          truth.mixture[0].begin() + static_cast<std::ptrdiff_t>(n) -
                              margin);
  const dsp::Signal tgt_i(truth.target_direct[0].begin() + margin,
                          truth.target_direct[0].begin() +
                              static_cast<std::ptrdiff_t>(n) - margin);
  return metrics::si_sdr(mix_i, tgt_i);
}

}  // namespace

TEST_CASE("concatenative run tracks a stationary speaker and improves SI-SDR") {
  const std::size_t frames = 120;
  const auto truth = single_speaker_scene(frames, 100);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  const auto cfg = base_config(pipeline::PipelineMode::Concatenative,
                               ssf::SsfKind::Oracle, truth.target.theta[0], 3);
  const auto trace = pipeline::run_concat(spec, cfg, kGeom, &truth);

  REQUIRE(trace.theta_est.size() == spec.frames());
  CHECK(median_ae(trace, truth.target.theta) < 3.0);

  const auto n = dsp::signal_length(spec.frames(), kCfg);
  CHECK(sisdr_vs_target(trace.enhanced_ref, truth) >= sisdr_input(truth, n));
}

TEST_CASE("a degenerate filter pinned at the truth stays there") {
  const std::size_t frames = 60;
  const auto truth = single_speaker_scene(frames, 101);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  auto cfg = base_config(pipeline::PipelineMode::Concatenative, ssf::SsfKind::Oracle,
                         truth.target.theta[0], 4);
  cfg.tracker.transition = tracker::TransitionModel::constant_velocity(0.0, 0.016);
  cfg.tracker.init_spread_theta = 0.0;
  cfg.tracker.init_spread_vel = 0.0;
  const auto trace = pipeline::run_concat(spec, cfg, kGeom, &truth);
  for (double est : trace.theta_est)
    CHECK(est == doctest::Approx(truth.target.theta[0]).epsilon(1e-12));
}

TEST_CASE("identical seeds give bit-identical traces") {
  const std::size_t frames = 80;
  const auto truth = two_speaker_scene(frames, 102);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  for (auto mode : {pipeline::PipelineMode::Concatenative,
                    pipeline::PipelineMode::Autoregressive}) {
    const auto cfg = base_config(mode, ssf::SsfKind::Oracle, truth.target.theta[0], 5);
    auto run = [&] {
      return mode == pipeline::PipelineMode::Concatenative
                 ? pipeline::run_concat(spec, cfg, kGeom, &truth)
                 : pipeline::run_ar(spec, cfg, kGeom, &truth);
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.theta_est == b.theta_est);
    CHECK(a.n_eff == b.n_eff);
    CHECK(a.resampled == b.resampled);
    for (std::size_t t = 0; t < spec.frames(); ++t)
      for (std::size_t k = 0; k < spec.bins(); ++k)
        CHECK(a.enhanced_ref.at(0, t, k) == b.enhanced_ref.at(0, t, k));
  }
}

TEST_CASE("all-ones masks make the loop degenerate to the concatenation") {
  const std::size_t frames = 80;
  const auto truth = two_speaker_scene(frames, 103);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  auto concat_cfg = base_config(pipeline::PipelineMode::Concatenative,
                                ssf::SsfKind::Oracle, truth.target.theta[0], 6);
  concat_cfg.ssf.oracle_degrade = 1.0;
  auto ar_cfg = base_config(pipeline::PipelineMode::Autoregressive,
                            ssf::SsfKind::Oracle, truth.target.theta[0], 6);
  ar_cfg.ssf.oracle_degrade = 1.0;

  const auto concat = pipeline::run_concat(spec, concat_cfg, kGeom, &truth);
  const auto ar = pipeline::run_ar(spec, ar_cfg, kGeom, &truth);
  CHECK(concat.theta_est == ar.theta_est);
  CHECK(concat.resampled == ar.resampled);
}

TEST_CASE("the feedback loop beats the concatenation on moving two-speaker scenes") {
  const std::size_t frames = 156;
  std::vector<double> concat_ae, ar_ae;
  for (std::uint64_t seed = 200; seed < 206; ++seed) {
    const auto truth = two_speaker_scene(frames, seed);
    const auto spec = dsp::stft(truth.mixture, kCfg);

    const auto c_cfg = base_config(pipeline::PipelineMode::Concatenative,
                                   ssf::SsfKind::Oracle, truth.target.theta[0], seed);
    const auto a_cfg = base_config(pipeline::PipelineMode::Autoregressive,
                                   ssf::SsfKind::Oracle, truth.target.theta[0], seed);
    const auto concat = pipeline::run_concat(spec, c_cfg, kGeom, &truth);
    const auto ar = pipeline::run_ar(spec, a_cfg, kGeom, &truth);
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      concat_ae.push_back(
          metrics::angular_error(concat.theta_est[t], truth.target.theta[t]));
      ar_ae.push_back(metrics::angular_error(ar.theta_est[t], truth.target.theta[t]));
    }
  }
  std::sort(concat_ae.begin(), concat_ae.end());
  std::sort(ar_ae.begin(), ar_ae.end());
  CHECK(ar_ae[ar_ae.size() / 2] < concat_ae[concat_ae.size() / 2]);
}

TEST_CASE("a single-frame input yields exactly one estimate") {
  const std::size_t frames = 40;
  const auto truth = single_speaker_scene(frames, 104);
  auto spec = dsp::stft(truth.mixture, kCfg);

  dsp::Spectrogram head(spec.channels(), 1, kCfg);
  for (std::size_t c = 0; c < spec.channels(); ++c)
    for (std::size_t k = 0; k < spec.bins(); ++k) head.at(c, 0, k) = spec.at(c, 0, k);

  const auto cfg = base_config(pipeline::PipelineMode::Autoregressive,
                               ssf::SsfKind::Oracle, truth.target.theta[0], 7);
  const auto trace = pipeline::run_ar(head, cfg, kGeom, &truth);
  CHECK(trace.theta_est.size() == 1);
  CHECK(trace.enhanced_ref.frames() == 1);
}

TEST_CASE("strong guidance improves every free-field scene and emits no estimates") {
  for (std::uint64_t seed = 300; seed < 303; ++seed) {
    const std::size_t frames = 100;
    const auto truth = two_speaker_scene(frames, seed);
    const auto spec = dsp::stft(truth.mixture, kCfg);

    auto cfg = base_config(pipeline::PipelineMode::StrongGuidance, ssf::SsfKind::Oracle,
                           truth.target.theta[0], 8);
    cfg.ssf.mode = ssf::SsfMode::Mimo;
    const auto trace = pipeline::run_strong(spec, cfg, kGeom, truth);
    CHECK(trace.theta_est.empty());
    const auto n = dsp::signal_length(spec.frames(), kCfg);
    CHECK(sisdr_vs_target(trace.enhanced_ref, truth) > sisdr_input(truth, n));
  }
}

TEST_CASE("with the cue-blind oracle, perfect tracking reproduces strong guidance") {
  const std::size_t frames = 80;
  const auto truth = two_speaker_scene(frames, 105);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  auto strong_cfg = base_config(pipeline::PipelineMode::StrongGuidance,
                                ssf::SsfKind::Oracle, truth.target.theta[0], 9);
  strong_cfg.ssf.mode = ssf::SsfMode::Mimo;
  const auto strong = pipeline::run_strong(spec, strong_cfg, kGeom, truth);

  const auto ar_cfg = base_config(pipeline::PipelineMode::Autoregressive,
                                  ssf::SsfKind::Oracle, truth.target.theta[0], 9);
  const auto ar = pipeline::run_ar(spec, ar_cfg, kGeom, &truth);
  for (std::size_t t = 0; t < spec.frames(); ++t)
    for (std::size_t k = 0; k < spec.bins(); ++k)
      CHECK(ar.enhanced_ref.at(0, t, k) == strong.enhanced_ref.at(0, t, k));
}

TEST_CASE("the mask at frame t does not depend on the current-frame estimate") {
  // One-frame lookahead contract: the mask is a function of (Y_t, the
  // previous estimate, the carried context) only.
  const std::size_t frames = 30;
  const auto truth = two_speaker_scene(frames, 106);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  ssf::SsfParams params;
  params.kind = ssf::SsfKind::Coherence;
  params.mode = ssf::SsfMode::Mimo;
  auto ctx_a = ssf::make_context();
  auto ctx_b = ssf::make_context();
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const double theta_prev = truth.target.theta[t > 0 ? t - 1 : 0];
    const auto a = ssf::mask_mimo(spec.frame(t), theta_prev, ctx_a, params, kGeom, kCfg);
    const auto b = ssf::mask_mimo(spec.frame(t), theta_prev, ctx_b, params, kGeom, kCfg);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("running on a prefix yields a prefix of the trace") {
  const std::size_t frames = 90;
  const auto truth = two_speaker_scene(frames, 107);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  const std::size_t cut = 40;
  dsp::Spectrogram prefix(spec.channels(), cut, kCfg);
  for (std::size_t c = 0; c < spec.channels(); ++c)
    for (std::size_t t = 0; t < cut; ++t)
      for (std::size_t k = 0; k < spec.bins(); ++k)
        prefix.at(c, t, k) = spec.at(c, t, k);

  for (auto kind : {ssf::SsfKind::Oracle, ssf::SsfKind::Coherence}) {
    const auto cfg = base_config(pipeline::PipelineMode::Autoregressive, kind,
                                 truth.target.theta[0], 10);
    const auto full = pipeline::run_ar(spec, cfg, kGeom, &truth);
    const auto part = pipeline::run_ar(prefix, cfg, kGeom, &truth);
    REQUIRE(part.theta_est.size() == cut);
    for (std::size_t t = 0; t < cut; ++t) {
      CHECK(part.theta_est[t] == full.theta_est[t]);
      for (std::size_t k = 0; k < spec.bins(); ++k)
        CHECK(part.enhanced_ref.at(0, t, k) == full.enhanced_ref.at(0, t, k));
    }
  }
}

TEST_CASE("configuration errors are rejected") {
  const std::size_t frames = 30;
  const auto truth = single_speaker_scene(frames, 108);
  const auto spec = dsp::stft(truth.mixture, kCfg);

  auto cfg = base_config(pipeline::PipelineMode::Autoregressive, ssf::SsfKind::Oracle,
                         0.0, 11);
  cfg.ssf.mode = ssf::SsfMode::Miso;
  CHECK_THROWS_AS((void)pipeline::run_ar(spec, cfg, kGeom, &truth),
                  std::invalid_argument);

  auto no_truth = base_config(pipeline::PipelineMode::Concatenative,
                              ssf::SsfKind::Oracle, 0.0, 12);
  CHECK_THROWS_AS((void)pipeline::run_concat(spec, no_truth, kGeom, nullptr),
                  std::invalid_argument);

  auto wrong_mode = base_config(pipeline::PipelineMode::Concatenative,
                                ssf::SsfKind::Oracle, 0.0, 13);
  CHECK_THROWS_AS((void)pipeline::run_ar(spec, wrong_mode, kGeom, &truth),
                  std::invalid_argument);
}
