#pragma once

// Minimal RIFF/WAVE reader and writer: 16-bit PCM and 32-bit IEEE float.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trigmp {

struct WavAudio {
  std::uint32_t sample_rate = 0;
  std::uint16_t channels = 0;
  /// Channel 0, scaled to [-1, 1].
  std::vector<double> samples;
};

/// Throws FormatError on anything but mono/multichannel PCM16 or float32.
WavAudio parse_wav(std::span<const std::uint8_t> bytes);
WavAudio read_wav(const std::string& path);

/// Mono 32-bit float WAV.
std::vector<std::uint8_t> encode_wav(std::span<const double> samples, std::uint32_t sample_rate);
void write_wav(const std::string& path, std::span<const double> samples, std::uint32_t sample_rate);

}  // namespace trigmp
