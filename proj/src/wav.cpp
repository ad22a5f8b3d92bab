#include "trigmp/wav.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "trigmp/errors.hpp"

namespace trigmp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le(std::span<const std::uint8_t> b, std::size_t at, std::size_t width) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put(std::vector<std::uint8_t>& out, std::uint32_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

WavAudio parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw FormatError("file too short for a RIFF header", bytes.size());
  if (!tag_is(bytes, 0, "RIFF")) throw FormatError("missing RIFF tag", 0);
  if (!tag_is(bytes, 8, "WAVE")) throw FormatError("missing WAVE tag", 8);

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = le(bytes, pos + 4, 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) throw FormatError("chunk runs past end of file", pos);

    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16) throw FormatError("fmt chunk too short", pos);
      format = static_cast<std::uint16_t>(le(bytes, body, 2));
      channels = static_cast<std::uint16_t>(le(bytes, body + 2, 2));
      rate = le(bytes, body + 4, 4);
      bits = static_cast<std::uint16_t>(le(bytes, body + 14, 2));
      if (format == kFormatExtensible) {
        if (size < 40) throw FormatError("extensible fmt chunk too short", pos);
        format = static_cast<std::uint16_t>(le(bytes, body + 24, 2));
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk", pos);
      if (channels == 0) throw FormatError("zero channels", pos);
      const bool pcm16 = format == kFormatPcm && bits == 16;
      const bool float32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !float32) {
        throw FormatError("unsupported sample format " + std::to_string(format) + "/" +
                              std::to_string(bits) + " bits (need PCM16 or float32)",
                          pos);
      }
      const std::size_t width = bits / 8;
      const std::size_t frame = width * channels;
      const std::size_t frames = size / frame;
      WavAudio audio;
      audio.sample_rate = rate;
      audio.channels = channels;
      audio.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t at = body + i * frame;
        if (pcm16) {
          const auto v = static_cast<std::int16_t>(le(bytes, at, 2));
          audio.samples[i] = static_cast<double>(v) / 32768.0;
        } else {
          audio.samples[i] = static_cast<double>(std::bit_cast<float>(le(bytes, at, 4)));
        }
      }
      return audio;
    }
    pos = body + size + (size & 1u);
  }
  throw FormatError(have_fmt ? "no data chunk" : "no fmt chunk", pos);
}

WavAudio read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(std::span<const double> samples, std::uint32_t sample_rate) {
  const auto data_size = static_cast<std::uint32_t>(samples.size() * 4);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put(out, 36 + data_size, 4);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put(out, 16, 4);
  put(out, kFormatFloat, 2);
  put(out, 1, 2);
  put(out, sample_rate, 4);
  put(out, sample_rate * 4, 4);
  put(out, 4, 2);
  put(out, 32, 2);
  put_tag(out, "data");
  put(out, data_size, 4);
  for (double s : samples) put(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)), 4);
  return out;
}

void write_wav(const std::string& path, std::span<const double> samples, std::uint32_t sample_rate) {
  const auto bytes = encode_wav(samples, sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace trigmp
