// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace selfsteer::wavio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

[[noreturn]] void fail(const std::filesystem::path& p, const std::string& why) {
  throw std::runtime_error("wav: " + p.string() + ": " + why);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  char tag[4];
  in.read(tag, 4);
  if (std::memcmp(tag, "RIFF", 4) != 0) fail(path, "not a RIFF file");
  read_le<std::uint32_t>(in);
  in.read(tag, 4);
  if (std::memcmp(tag, "WAVE", 4) != 0) fail(path, "not a WAVE file");

  std::uint16_t format = 0, n_channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> payload;
  bool have_fmt = false, have_data = false;

  while (in && !(have_fmt && have_data)) {
    in.read(tag, 4);
    const auto size = read_le<std::uint32_t>(in);
    if (!in) break;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(in);
      n_channels = read_le<std::uint16_t>(in);
      rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      payload.resize(size);
      in.read(payload.data(), size);
      have_data = true;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || !have_data) fail(path, "missing fmt or data chunk");
  if (n_channels == 0) fail(path, "zero channels");

  const std::size_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0) fail(path, "bad bit depth");
  const std::size_t frames = payload.size() / (bytes_per_sample * n_channels);

  WavData wav;
  wav.sample_rate = rate;
  wav.channels.assign(n_channels, dsp::Signal(frames));

  const char* p = payload.data();
  if (format == kFormatFloat && bits == 32) {
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t c = 0; c < n_channels; ++c) {
        float v;
        std::memcpy(&v, p, 4);
        p += 4;
        wav.channels[c][i] = v;
      }
  } else if (format == kFormatPcm && bits == 16) {
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t c = 0; c < n_channels; ++c) {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        p += 2;
        wav.channels[c][i] = static_cast<double>(v) / 32768.0;
      }
  } else {
    fail(path, "unsupported format (need 16-bit PCM or 32-bit float)");
  }
  return wav;
}

void write_wav_float32(const std::filesystem::path& path,
                       const dsp::MultichannelSignal& channels, double sample_rate) {
  if (channels.empty()) throw std::invalid_argument("wav: no channels to write");
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels)
    if (ch.size() != frames) throw std::invalid_argument("wav: ragged channel lengths");

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");

  const auto n_channels = static_cast<std::uint16_t>(channels.size());
  const auto rate = static_cast<std::uint32_t>(sample_rate);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * n_channels * 4);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 4 + 26 + 12 + 8 + data_bytes);
  out.write("WAVE", 4);

  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 18);
  write_le<std::uint16_t>(out, kFormatFloat);
  write_le<std::uint16_t>(out, n_channels);
  write_le<std::uint32_t>(out, rate);
  write_le<std::uint32_t>(out, rate * n_channels * 4);
  write_le<std::uint16_t>(out, n_channels * 4);
  write_le<std::uint16_t>(out, 32);
  write_le<std::uint16_t>(out, 0);  // no extension

  out.write("fact", 4);
  write_le<std::uint32_t>(out, 4);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(frames));

  out.write("data", 4);
  write_le<std::uint32_t>(out, data_bytes);
  for (std::size_t i = 0; i < frames; ++i)
    for (std::size_t c = 0; c < n_channels; ++c)
      write_le<float>(out, static_cast<float>(channels[c][i]));
  if (!out) fail(path, "write failed");
}

}  // namespace selfsteer::wavio
