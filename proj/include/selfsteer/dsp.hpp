// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace selfsteer::dsp {

// Analysis/synthesis parametrization: 32 ms square-root Hann window with
// 16 ms hop at 16 kHz. The first frame starts at sample 0 (no centering),
// so frame t corresponds to time t*hop/sample_rate.
struct StftConfig {
  double sample_rate = 16000.0;
  std::size_t window_len = 512;
  std::size_t hop = 256;

  std::size_t bins() const { return window_len / 2 + 1; }
  double bin_freq_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate / static_cast<double>(window_len);
  }
  double frame_dt() const { return static_cast<double>(hop) / sample_rate; }
};

// Square-root Hann window, half-sample-shifted variant w[n] = sin(pi*(n+0.5)/n_len).
// Strictly positive, and w^2 overlap-adds to exactly 1 at hop = n_len/2.
std::vector<double> sqrt_hann_window(std::size_t n_len);

using Signal = std::vector<double>;
using MultichannelSignal = std::vector<Signal>;  // [channel][sample]

// Borrowed view of one time-frequency frame (channels x bins).
struct FrameView {
  const std::complex<double>* data = nullptr;
  std::size_t channels = 0;
  std::size_t bins = 0;
  std::size_t channel_stride = 0;

  const std::complex<double>& operator()(std::size_t c, std::size_t k) const {
    return data[c * channel_stride + k];
  }
};

// Owned channels x bins frame, e.g. the output of a mask application.
struct Frame {
  std::size_t channels = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> values;

  Frame() = default;
  Frame(std::size_t n_channels, std::size_t n_bins)
      : channels(n_channels), bins(n_bins), values(n_channels * n_bins) {}

  std::complex<double>& operator()(std::size_t c, std::size_t k) {
    return values[c * bins + k];
  }
  const std::complex<double>& operator()(std::size_t c, std::size_t k) const {
    return values[c * bins + k];
  }
  FrameView view() const { return {values.data(), channels, bins, bins}; }
};

// Complex time-frequency tensor indexed [channel][frame][bin].
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t channels, std::size_t frames, StftConfig cfg);

  std::complex<double>& at(std::size_t c, std::size_t t, std::size_t k) {
    return data_[(c * frames_ + t) * bins_ + k];
  }
  const std::complex<double>& at(std::size_t c, std::size_t t, std::size_t k) const {
    return data_[(c * frames_ + t) * bins_ + k];
  }

  FrameView frame(std::size_t t) const {
    return {data_.data() + t * bins_, channels_, bins_, frames_ * bins_};
  }
  void set_frame(std::size_t t, const Frame& f);

  std::size_t channels() const { return channels_; }
  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  const StftConfig& config() const { return cfg_; }

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  StftConfig cfg_{};
  std::vector<std::complex<double>> data_;
};

// Forward transform. Frame count = floor((len - window_len)/hop) + 1.
// Throws std::invalid_argument on a signal shorter than one window
// ("input too short") or containing non-finite samples ("invalid signal").
Spectrogram stft(const MultichannelSignal& signal, const StftConfig& cfg);

// Weighted overlap-add synthesis with the same square-root Hann window.
// Reconstruction is exact (up to rounding) away from the first and last
// window_len samples. Throws on a bin/config mismatch.
MultichannelSignal istft(const Spectrogram& spec);

// Number of samples istft(stft(x)) produces for a given frame count.
inline std::size_t signal_length(std::size_t frames, const StftConfig& cfg) {
  return (frames - 1) * cfg.hop + cfg.window_len;
}

}  // namespace selfsteer::dsp
