#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "trigmp/errors.hpp"
#include "trigmp/wav.hpp"

using namespace trigmp;

namespace {

void put(std::vector<std::uint8_t>& out, std::uint32_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::vector<std::uint8_t> pcm16(std::uint16_t channels, const std::vector<std::int16_t>& frames,
                                std::uint16_t format = 1, std::uint16_t bits = 16) {
  std::vector<std::uint8_t> out;
  put_tag(out, "RIFF");
  put(out, 0, 4);
  put_tag(out, "WAVE");
  // An unrelated chunk first, with odd size and pad byte.
  put_tag(out, "LIST");
  put(out, 3, 4);
  out.insert(out.end(), {1, 2, 3, 0});
  put_tag(out, "fmt ");
  put(out, 16, 4);
  put(out, format, 2);
  put(out, channels, 2);
  put(out, 22050, 4);
  put(out, 22050u * channels * 2, 4);
  put(out, channels * 2u, 2);
  put(out, bits, 2);
  put_tag(out, "data");
  put(out, static_cast<std::uint32_t>(frames.size() * 2), 4);
  for (auto s : frames) put(out, static_cast<std::uint16_t>(s), 2);
  return out;
}

}  // namespace

TEST(Wav, FloatRoundTrip) {
  const std::vector<double> samples{0.0, 0.5, -0.25, 0.125, -1.0};
  const auto bytes = encode_wav(samples, 48000);
  EXPECT_EQ(bytes.size(), 44u + 20u);
  const auto audio = parse_wav(bytes);
  EXPECT_EQ(audio.sample_rate, 48000u);
  EXPECT_EQ(audio.channels, 1u);
  EXPECT_EQ(audio.samples, samples);
}

TEST(Wav, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "trigmp_wav_test.wav").string();
  const std::vector<double> samples{0.1, 0.2, 0.3};
  write_wav(path, samples, 8000);
  const auto audio = read_wav(path);
  ASSERT_EQ(audio.samples.size(), 3u);
  EXPECT_NEAR(audio.samples[1], 0.2, 1e-7);
  std::filesystem::remove(path);
  EXPECT_THROW(read_wav(path), std::runtime_error);
}

TEST(Wav, Pcm16StereoKeepsFirstChannel) {
  const auto audio = parse_wav(pcm16(2, {16384, -1, -32768, 7}));
  EXPECT_EQ(audio.channels, 2u);
  EXPECT_EQ(audio.sample_rate, 22050u);
  ASSERT_EQ(audio.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(audio.samples[0], 0.5);
  EXPECT_DOUBLE_EQ(audio.samples[1], -1.0);
}

TEST(Wav, RejectsUnsupportedOrBrokenFiles) {
  EXPECT_THROW(parse_wav(pcm16(1, {1, 2}, 1, 24)), FormatError);
  EXPECT_THROW(parse_wav(pcm16(1, {1, 2}, 6, 16)), FormatError);
  auto bytes = pcm16(1, {1, 2});
  bytes[0] = 'X';
  EXPECT_THROW(parse_wav(bytes), FormatError);
  bytes = pcm16(1, {1, 2, 3, 4});
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(parse_wav(bytes), FormatError);
  EXPECT_THROW(parse_wav(std::vector<std::uint8_t>(5, 0)), FormatError);
}
