// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>

#include "selfsteer/dsp.hpp"

namespace selfsteer::wavio {

struct WavData {
  double sample_rate = 0.0;
  dsp::MultichannelSignal channels;

  std::size_t samples() const { return channels.empty() ? 0 : channels[0].size(); }
};

// Reads 16-bit PCM or 32-bit float RIFF/WAVE files.
WavData read_wav(const std::filesystem::path& path);

// Writes 32-bit float PCM (format tag 3), interleaved.
void write_wav_float32(const std::filesystem::path& path,
                       const dsp::MultichannelSignal& channels, double sample_rate);

}  // namespace selfsteer::wavio
