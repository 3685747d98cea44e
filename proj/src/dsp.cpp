// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace selfsteer::dsp {

namespace {

// FFTW planner access is serialized; execution on private buffers is not.
struct FftPlans {
  fftw_plan fwd = nullptr;   // r2c
  fftw_plan inv = nullptr;   // c2r (unnormalized)
};

FftPlans& plans_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  double* re = fftw_alloc_real(n);
  fftw_complex* cx = fftw_alloc_complex(n / 2 + 1);
  FftPlans p;
  p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), re, cx, FFTW_ESTIMATE);
  p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), cx, re, FFTW_ESTIMATE);
  fftw_free(re);
  fftw_free(cx);
  if (!p.fwd || !p.inv) throw std::runtime_error("stft: fft plan creation failed");
  return cache.emplace(n, p).first->second;
}

struct FftBuffers {
  double* re;
  fftw_complex* cx;
  std::size_t n;

  explicit FftBuffers(std::size_t n_len)
      : re(fftw_alloc_real(n_len)), cx(fftw_alloc_complex(n_len / 2 + 1)), n(n_len) {}
  ~FftBuffers() {
    fftw_free(re);
    fftw_free(cx);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

void validate_config(const StftConfig& cfg) {
  if (cfg.window_len < 2 || cfg.window_len % 2 != 0)
    throw std::invalid_argument("stft: window length must be even and >= 2");
  if (cfg.hop == 0 || cfg.hop > cfg.window_len)
    throw std::invalid_argument("stft: hop must be in [1, window_len]");
  if (cfg.sample_rate <= 0.0)
    throw std::invalid_argument("stft: sample rate must be positive");
}

}  // namespace

std::vector<double> sqrt_hann_window(std::size_t n_len) {
  std::vector<double> w(n_len);
  for (std::size_t n = 0; n < n_len; ++n)
    w[n] = std::sin(std::numbers::pi * (static_cast<double>(n) + 0.5) /
                    static_cast<double>(n_len));
  return w;
}

Spectrogram::Spectrogram(std::size_t channels, std::size_t frames, StftConfig cfg)
    : channels_(channels),
      frames_(frames),
      bins_(cfg.bins()),
      cfg_(cfg),
      data_(channels * frames * cfg.bins()) {}

void Spectrogram::set_frame(std::size_t t, const Frame& f) {
  if (f.channels != channels_ || f.bins != bins_)
    throw std::invalid_argument("spectrogram: frame shape mismatch");
  for (std::size_t c = 0; c < channels_; ++c)
    for (std::size_t k = 0; k < bins_; ++k) at(c, t, k) = f(c, k);
}

Spectrogram stft(const MultichannelSignal& signal, const StftConfig& cfg) {
  validate_config(cfg);
  if (signal.empty()) throw std::invalid_argument("stft: input too short");
  const std::size_t len = signal[0].size();
  for (const auto& ch : signal) {
    if (ch.size() != len) throw std::invalid_argument("stft: ragged channel lengths");
    for (double v : ch)
      if (!std::isfinite(v)) throw std::invalid_argument("stft: invalid signal");
  }
  if (len < cfg.window_len) throw std::invalid_argument("stft: input too short");

  const std::size_t frames = (len - cfg.window_len) / cfg.hop + 1;
  const std::size_t bins = cfg.bins();
  const auto window = sqrt_hann_window(cfg.window_len);
  const FftPlans& plans = plans_for(cfg.window_len);

  Spectrogram spec(signal.size(), frames, cfg);
  FftBuffers buf(cfg.window_len);
  for (std::size_t c = 0; c < signal.size(); ++c) {
    for (std::size_t t = 0; t < frames; ++t) {
      const double* x = signal[c].data() + t * cfg.hop;
      for (std::size_t n = 0; n < cfg.window_len; ++n) buf.re[n] = x[n] * window[n];
      fftw_execute_dft_r2c(plans.fwd, buf.re, buf.cx);
      for (std::size_t k = 0; k < bins; ++k)
        spec.at(c, t, k) = {buf.cx[k][0], buf.cx[k][1]};
    }
  }
  return spec;
}

MultichannelSignal istft(const Spectrogram& spec) {
  const StftConfig& cfg = spec.config();
  validate_config(cfg);
  if (spec.bins() != cfg.bins())
    throw std::invalid_argument("istft: bin count inconsistent with config");
  if (spec.frames() == 0) throw std::invalid_argument("istft: empty spectrogram");

  const std::size_t len = signal_length(spec.frames(), cfg);
  const auto window = sqrt_hann_window(cfg.window_len);
  const FftPlans& plans = plans_for(cfg.window_len);
  const double scale = 1.0 / static_cast<double>(cfg.window_len);

  MultichannelSignal out(spec.channels(), Signal(len, 0.0));
  FftBuffers buf(cfg.window_len);
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      for (std::size_t k = 0; k < spec.bins(); ++k) {
        buf.cx[k][0] = spec.at(c, t, k).real();
        buf.cx[k][1] = spec.at(c, t, k).imag();
      }
      fftw_execute_dft_c2r(plans.inv, buf.cx, buf.re);
      double* y = out[c].data() + t * cfg.hop;
      for (std::size_t n = 0; n < cfg.window_len; ++n)
        y[n] += buf.re[n] * scale * window[n];
    }
  }
  return out;
}

}  // namespace selfsteer::dsp
