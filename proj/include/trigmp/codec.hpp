#pragma once

// Block partitioning, per-block sparse coding and the SSC1 coefficient
// stream.
//
// SSC1 layout (all integers little-endian, floats IEEE-754 binary64 LE):
//
//   offset  size  field
//   0       4     magic "SSC1"
//   4       2     version (u16, currently 1)
//   6       1     dictionary case (u8, 1=dft 2=dct 3=dst 4=mixed)
//   7       4     M, atom count (u32)
//   11      4     N_b, block length (u32)
//   15      4     Q, block count (u32)
//   19      4     pad_len, zeros appended to the last block (u32)
//   23      4     sample rate in Hz (u32)
//   27      8     target SNR in dB (f64)
//   35      1     method (u8, 0=mp 1=spmp 2=basis)
//   36      ...   Q block records
//
// Block record: k_q (u32) followed by k_q entries, each an atom index (u32,
// 1-based, strictly increasing within the block) and the coefficient: two
// f64 (re, im) for dft streams, one f64 otherwise.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trigmp/dictionary.hpp"
#include "trigmp/fft.hpp"
#include "trigmp/pursuit.hpp"

namespace trigmp {

enum class EncodingMethod : std::uint8_t {
  MatchingPursuit = 0,
  SelfProjectedMP = 1,
  BasisThreshold = 2,
};

std::string_view to_string(EncodingMethod method);
/// Accepts "mp", "spmp", "basis".
EncodingMethod parse_method(std::string_view name);

struct PartitionedSignal {
  std::vector<std::vector<double>> blocks;
  std::size_t length = 0;      // original signal length
  std::size_t block_size = 0;
  std::size_t pad_len = 0;

  std::size_t count() const noexcept { return blocks.size(); }
  /// Blocks joined and truncated back to `length`.
  std::vector<double> join() const;
};

/// Zero-pads the tail so every block has `block_size` samples.
PartitionedSignal partition(std::span<const double> signal, std::size_t block_size);

/// ||block|| * 10^(-snr/20): the residual norm at which the block alone
/// reaches the target SNR.
double block_tolerance(std::span<const double> block, double target_snr_db);

inline constexpr std::uint16_t kStreamVersion = 1;

struct StreamHeader {
  std::uint16_t version = kStreamVersion;
  DictionaryCase kind = DictionaryCase::CosineSine;
  std::uint32_t atoms = 0;
  std::uint32_t block_size = 0;
  std::uint32_t block_count = 0;
  std::uint32_t pad_len = 0;
  std::uint32_t sample_rate = 0;
  double target_snr = 0.0;
  EncodingMethod method = EncodingMethod::SelfProjectedMP;

  DictionarySpec dictionary() const { return {kind, atoms, block_size}; }
  std::size_t signal_length() const {
    return static_cast<std::size_t>(block_count) * block_size - pad_len;
  }
  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

struct CoefficientEntry {
  AtomIndex index = 0;
  Complex value;
  friend bool operator==(const CoefficientEntry&, const CoefficientEntry&) = default;
};

struct BlockRecord {
  std::vector<CoefficientEntry> entries;
  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct EncodedStream {
  StreamHeader header;
  std::vector<BlockRecord> blocks;

  /// K = sum_q k_q.
  std::size_t total_coefficients() const;
  friend bool operator==(const EncodedStream&, const EncodedStream&) = default;
};

/// Per-block bookkeeping kept alongside the stream (not serialized).
struct BlockLog {
  std::size_t selections = 0;
  std::vector<std::size_t> projection_iterations;  // kappa_k per selection
  double tolerance = 0.0;
  double residual_norm = 0.0;
};

struct EncodeOptions {
  EncodingMethod method = EncodingMethod::SelfProjectedMP;
  double target_snr = 35.0;
  std::uint32_t sample_rate = 44100;
  /// Worker threads; 0 means hardware concurrency.
  unsigned jobs = 0;
  /// Pursuit knobs. epsilon_factor scales each block's rho into its
  /// projection tolerance.
  PursuitOptions pursuit;
};

struct EncodeResult {
  EncodedStream stream;
  std::vector<BlockLog> logs;
};

/// Encodes each block of `signal` (block length spec.dim()) independently.
/// Pursuit failures are rethrown as PursuitAborted carrying the block index.
EncodeResult encode(std::span<const double> signal, const DictionarySpec& spec,
                    const EncodeOptions& options);

/// Keeps the largest orthonormal-basis coefficients of one block until the
/// residual norm is at most rho. Requires spec.is_basis().
BlockRecord encode_basis_block(std::span<const double> block, const DictionarySpec& spec,
                               double rho, InnerProductEngine& engine);

/// Throws FormatError for indices outside [1, M] or unpaired Fourier terms.
std::vector<double> reconstruct_block(const BlockRecord& record, const StreamHeader& header);
std::vector<double> decode(const EncodedStream& stream);

std::vector<std::uint8_t> serialize(const EncodedStream& stream);
/// Throws FormatError (with byte offset) on malformed or truncated input.
EncodedStream parse_stream(std::span<const std::uint8_t> bytes);

/// Canonical JSON rendering of a stream, for inspection and diffs.
std::string to_json(const EncodedStream& stream);

void write_stream(const std::string& path, const EncodedStream& stream);
EncodedStream read_stream(const std::string& path);

}  // namespace trigmp
