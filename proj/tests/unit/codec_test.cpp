#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "test_support.hpp"
#include "trigmp/codec.hpp"
#include "trigmp/errors.hpp"
#include "trigmp/metrics.hpp"
#include "trigmp/synth.hpp"

using namespace trigmp;
using trigmp::testing::kAllCases;
using trigmp::testing::norm2;
using trigmp::testing::random_signal;

namespace {

EncodeOptions options_for(EncodingMethod method, double snr = 30.0, unsigned jobs = 1) {
  EncodeOptions o;
  o.method = method;
  o.target_snr = snr;
  o.jobs = jobs;
  o.sample_rate = 8000;
  return o;
}

EncodedStream small_stream(DictionaryCase kind) {
  const DictionarySpec spec(kind, 64, 16);
  const auto signal = random_signal(40, 3);
  return encode(signal, spec, options_for(EncodingMethod::SelfProjectedMP)).stream;
}

}  // namespace

TEST(Partition, PadsTailAndJoins) {
  const auto signal = random_signal(10, 1);
  const auto parts = partition(signal, 4);
  EXPECT_EQ(parts.count(), 3u);
  EXPECT_EQ(parts.pad_len, 2u);
  EXPECT_EQ(parts.blocks[2][2], 0.0);
  EXPECT_EQ(parts.blocks[2][3], 0.0);
  EXPECT_EQ(parts.join(), signal);
  EXPECT_EQ(partition(random_signal(8, 1), 4).pad_len, 0u);
  EXPECT_THROW(partition(signal, 1), DomainError);
  EXPECT_THROW(partition(std::vector<double>{}, 4), DomainError);
}

TEST(BlockTolerance, ScalesWithSnr) {
  const std::vector<double> b{3.0, 4.0};
  EXPECT_NEAR(block_tolerance(b, 20.0), 0.5, 1e-15);
  EXPECT_NEAR(block_tolerance(b, 0.0), 5.0, 1e-15);
}

TEST(Encode, EveryBlockMeetsTarget) {
  for (auto kind : kAllCases) {
    for (auto method : {EncodingMethod::MatchingPursuit, EncodingMethod::SelfProjectedMP}) {
      const DictionarySpec spec(kind, 128, 32);
      const auto signal = synth::decaying_mixture(200, 8000, 5);
      const auto result = encode(signal, spec, options_for(method, 25.0));
      const auto decoded = decode(result.stream);
      ASSERT_EQ(decoded.size(), signal.size());
      EXPECT_GE(snr_db(signal, decoded), 25.0 - 1e-9);
      for (const auto& log : result.logs) EXPECT_LE(log.residual_norm, log.tolerance * (1 + 1e-9));
    }
  }
}

TEST(Encode, BasisMethodNeedsOrthonormalDictionary) {
  const auto signal = random_signal(64, 2);
  EXPECT_THROW(encode(signal, DictionarySpec(DictionaryCase::Cosine, 64, 32),
                      options_for(EncodingMethod::BasisThreshold)),
               DomainError);
  for (auto kind : kAllCases) {
    const auto result = encode(signal, DictionarySpec(kind, 32, 32),
                               options_for(EncodingMethod::BasisThreshold, 20.0));
    EXPECT_GE(snr_db(signal, decode(result.stream)), 20.0 - 1e-9) << to_string(kind);
  }
}

TEST(Encode, GridSinusoidHitsTwoFourierBins) {
  const std::size_t nb = 256;
  const auto signal = synth::grid_sinusoids(4 * nb, nb, 1, 9);
  const auto result = encode(signal, DictionarySpec(DictionaryCase::Fourier, nb, nb),
                             options_for(EncodingMethod::BasisThreshold, 35.0));
  for (const auto& b : result.stream.blocks) EXPECT_EQ(b.entries.size(), 2u);
}

TEST(Encode, SilentBlocksAreEmpty) {
  std::vector<double> signal(96, 0.0);
  for (std::size_t j = 32; j < 64; ++j) signal[j] = std::sin(0.3 * j);
  const auto result =
      encode(signal, DictionarySpec(DictionaryCase::CosineSine, 128, 32), options_for(EncodingMethod::SelfProjectedMP));
  EXPECT_TRUE(result.stream.blocks[0].entries.empty());
  EXPECT_FALSE(result.stream.blocks[1].entries.empty());
  EXPECT_TRUE(result.stream.blocks[2].entries.empty());
  EXPECT_TRUE(result.logs[0].projection_iterations.empty());
}

TEST(Encode, DeterministicAcrossJobCounts) {
  const DictionarySpec spec(DictionaryCase::CosineSine, 256, 64);
  const auto signal = synth::decaying_mixture(64 * 9 + 13, 8000, 2);
  const auto one = encode(signal, spec, options_for(EncodingMethod::SelfProjectedMP, 30.0, 1));
  const auto four = encode(signal, spec, options_for(EncodingMethod::SelfProjectedMP, 30.0, 4));
  EXPECT_EQ(serialize(one.stream), serialize(four.stream));
}

TEST(Encode, AbortCarriesBlockIndex) {
  std::vector<double> signal(64, 0.0);
  const auto noise = random_signal(32, 4);
  std::copy(noise.begin(), noise.end(), signal.begin() + 32);
  auto options = options_for(EncodingMethod::SelfProjectedMP, 60.0);
  options.pursuit.epsilon = 1e-300;
  options.pursuit.projection_cap_per_atom = 1;
  try {
    encode(signal, DictionarySpec(DictionaryCase::Cosine, 64, 32), options);
    FAIL() << "expected PursuitAborted";
  } catch (const PursuitAborted& e) {
    ASSERT_TRUE(e.block());
    EXPECT_EQ(*e.block(), 1u);
  }
}

TEST(Stream, HeaderLayout) {
  const auto stream = small_stream(DictionaryCase::Cosine);
  const auto bytes = serialize(stream);
  ASSERT_GE(bytes.size(), 36u);
  EXPECT_EQ(std::memcmp(bytes.data(), "SSC1", 4), 0);
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 2);
  EXPECT_EQ(bytes[7], 64);
  EXPECT_EQ(bytes[11], 16);
  EXPECT_EQ(bytes[15], 3);
  EXPECT_EQ(bytes[19], 8);
  EXPECT_EQ(bytes[23] | (bytes[24] << 8), 8000);
  double snr;
  std::memcpy(&snr, bytes.data() + 27, 8);
  EXPECT_EQ(snr, 30.0);
  EXPECT_EQ(bytes[35], 1);
  std::size_t expected = 36;
  for (const auto& b : stream.blocks) expected += 4 + 12 * b.entries.size();
  EXPECT_EQ(bytes.size(), expected);
}

TEST(Stream, RoundTripIsByteExact) {
  for (auto kind : kAllCases) {
    const auto stream = small_stream(kind);
    const auto bytes = serialize(stream);
    const auto parsed = parse_stream(bytes);
    EXPECT_EQ(parsed, stream);
    EXPECT_EQ(serialize(parsed), bytes);
  }
}

TEST(Stream, FourierEntriesCarryImaginaryParts) {
  const auto stream = small_stream(DictionaryCase::Fourier);
  std::size_t expected = 36;
  for (const auto& b : stream.blocks) expected += 4 + 20 * b.entries.size();
  EXPECT_EQ(serialize(stream).size(), expected);
}

TEST(Stream, MalformedInputReportsOffset) {
  const auto good = serialize(small_stream(DictionaryCase::Cosine));
  auto expect_offset = [](const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    try {
      parse_stream(bytes);
      ADD_FAILURE() << "expected FormatError";
    } catch (const FormatError& e) {
      EXPECT_EQ(e.offset(), offset) << e.what();
    }
  };

  auto bad = good;
  bad[2] = 'X';
  expect_offset(bad, 2);

  bad = good;
  bad[4] = 2;
  expect_offset(bad, 4);

  bad = good;
  bad[6] = 9;
  expect_offset(bad, 6);

  bad = good;
  bad[35] = 7;
  expect_offset(bad, 35);

  expect_offset(std::vector<std::uint8_t>(good.begin(), good.begin() + 20), 19);
  expect_offset(std::vector<std::uint8_t>(good.begin(), good.end() - 3), good.size() - 8);

  bad = good;
  bad.push_back(0);
  expect_offset(bad, good.size());

  // First entry of block 0: index at byte 40.
  bad = good;
  bad[40] = 0;
  bad[41] = bad[42] = bad[43] = 0;
  expect_offset(bad, 40);
}

TEST(Stream, RejectsNonIncreasingIndices) {
  auto stream = small_stream(DictionaryCase::Cosine);
  ASSERT_GE(stream.blocks[0].entries.size(), 2u);
  std::swap(stream.blocks[0].entries[0], stream.blocks[0].entries[1]);
  EXPECT_THROW(parse_stream(serialize(stream)), FormatError);
}

TEST(Decode, RejectsUnpairedFourierTerm) {
  auto stream = small_stream(DictionaryCase::Fourier);
  auto& entries = stream.blocks[0].entries;
  const auto it = std::find_if(entries.begin(), entries.end(), [](const CoefficientEntry& e) {
    return e.value.imag() != 0.0;
  });
  ASSERT_NE(it, entries.end());
  entries.erase(it);
  EXPECT_THROW(decode(stream), FormatError);
}

TEST(Json, ListsHeaderAndEntries) {
  const auto stream = small_stream(DictionaryCase::Cosine);
  const auto json = to_json(stream);
  EXPECT_NE(json.find("\"format\": \"SSC1\""), std::string::npos);
  EXPECT_NE(json.find("\"case\": \"dct\""), std::string::npos);
  EXPECT_NE(json.find("\"method\": \"spmp\""), std::string::npos);
  EXPECT_EQ(json, to_json(parse_stream(serialize(stream))));
}

TEST(Method, Names) {
  EXPECT_EQ(parse_method("mp"), EncodingMethod::MatchingPursuit);
  EXPECT_EQ(parse_method("spmp"), EncodingMethod::SelfProjectedMP);
  EXPECT_EQ(parse_method("basis"), EncodingMethod::BasisThreshold);
  EXPECT_EQ(to_string(EncodingMethod::BasisThreshold), "basis");
  EXPECT_THROW(parse_method("omp"), DomainError);
}
