#include "trigmp/codec.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <optional>
#include <thread>

#include <json.hpp>

#include "trigmp/errors.hpp"

namespace trigmp {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

std::string_view to_string(EncodingMethod method) {
  switch (method) {
    case EncodingMethod::MatchingPursuit: return "mp";
    case EncodingMethod::SelfProjectedMP: return "spmp";
    case EncodingMethod::BasisThreshold: return "basis";
  }
  return "?";
}

EncodingMethod parse_method(std::string_view name) {
  if (name == "mp") return EncodingMethod::MatchingPursuit;
  if (name == "spmp") return EncodingMethod::SelfProjectedMP;
  if (name == "basis") return EncodingMethod::BasisThreshold;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

std::vector<double> PartitionedSignal::join() const {
  std::vector<double> out;
  out.reserve(blocks.size() * block_size);
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  out.resize(length);
  return out;
}

PartitionedSignal partition(std::span<const double> signal, std::size_t block_size) {
  if (block_size < 2) throw DomainError("partition: block size must be at least 2");
  if (signal.empty()) throw DomainError("partition: empty signal");
  PartitionedSignal out;
  out.length = signal.size();
  out.block_size = block_size;
  const std::size_t count = (signal.size() + block_size - 1) / block_size;
  out.pad_len = count * block_size - signal.size();
  out.blocks.reserve(count);
  for (std::size_t q = 0; q < count; ++q) {
    const std::size_t begin = q * block_size;
    const std::size_t end = std::min(begin + block_size, signal.size());
    std::vector<double> block(signal.begin() + begin, signal.begin() + end);
    block.resize(block_size, 0.0);
    out.blocks.push_back(std::move(block));
  }
  return out;
}

double block_tolerance(std::span<const double> block, double target_snr_db) {
  if (!std::isfinite(target_snr_db)) throw DomainError("block_tolerance: target SNR must be finite");
  return norm2(block) * std::pow(10.0, -target_snr_db / 20.0);
}

std::size_t EncodedStream::total_coefficients() const {
  std::size_t k = 0;
  for (const auto& b : blocks) k += b.entries.size();
  return k;
}

BlockRecord encode_basis_block(std::span<const double> block, const DictionarySpec& spec,
                               double rho, InnerProductEngine& engine) {
  if (!spec.is_basis()) {
    throw DomainError("basis thresholding needs M == N (got M=" + std::to_string(spec.atoms()) +
                      ", N=" + std::to_string(spec.dim()) + ")");
  }
  const InnerProductVector ip = engine.compute(block);

  struct Candidate {
    AtomIndex index;
    Complex value;
    double energy;
  };
  std::vector<Candidate> candidates;
  const std::size_t range = selection_range(spec);
  candidates.reserve(range);
  for (std::size_t n = 1; n <= range; ++n) {
    const auto index = static_cast<AtomIndex>(n);
    Complex value = ip.at(index);
    double energy = std::norm(value);
    if (spec.is_complex()) {
      if (conjugate_partner(index, spec.atoms())) {
        energy *= 2.0;
      } else {
        value = {value.real(), 0.0};
        energy = value.real() * value.real();
      }
    }
    candidates.push_back({index, value, energy});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.energy > b.energy;
  });

  // Orthonormal basis: the residual energy is the signal energy minus the
  // energy of the kept terms.
  double residual_energy = 0.0;
  for (double x : block) residual_energy += x * x;
  const double target = rho * rho;

  BlockRecord record;
  for (const auto& c : candidates) {
    if (residual_energy <= target) break;
    record.entries.push_back({c.index, c.value});
    if (spec.is_complex()) {
      if (const auto partner = conjugate_partner(c.index, spec.atoms())) {
        record.entries.push_back({*partner, std::conj(c.value)});
      }
    }
    residual_energy -= c.energy;
  }
  std::sort(record.entries.begin(), record.entries.end(),
            [](const CoefficientEntry& a, const CoefficientEntry& b) { return a.index < b.index; });
  return record;
}

EncodeResult encode(std::span<const double> signal, const DictionarySpec& spec,
                    const EncodeOptions& options) {
  if (options.method == EncodingMethod::BasisThreshold && !spec.is_basis()) {
    throw DomainError("basis method requires redundancy 1");
  }
  if (spec.atoms() > UINT32_MAX) throw DomainError("dictionary too large for SSC1");
  const PartitionedSignal parts = partition(signal, spec.dim());
  const std::size_t count = parts.count();

  EncodeResult result;
  auto& header = result.stream.header;
  header.kind = spec.kind();
  header.atoms = static_cast<std::uint32_t>(spec.atoms());
  header.block_size = static_cast<std::uint32_t>(spec.dim());
  header.block_count = static_cast<std::uint32_t>(count);
  header.pad_len = static_cast<std::uint32_t>(parts.pad_len);
  header.sample_rate = options.sample_rate;
  header.target_snr = options.target_snr;
  header.method = options.method;
  result.stream.blocks.resize(count);
  result.logs.resize(count);
  std::vector<std::exception_ptr> failures(count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::optional<Pursuit> pursuit;
    std::optional<InnerProductEngine> engine;
    for (std::size_t q = next++; q < count; q = next++) {
      try {
        const auto& block = parts.blocks[q];
        const double rho = block_tolerance(block, options.target_snr);
        BlockLog& log = result.logs[q];
        log.tolerance = rho;
        BlockRecord& record = result.stream.blocks[q];
        if (rho == 0.0) continue;  // silent block

        if (options.method == EncodingMethod::BasisThreshold) {
          if (!engine) engine.emplace(spec);
          record = encode_basis_block(block, spec, rho, *engine);
          log.selections = record.entries.size();
          std::vector<double> approx = reconstruct_block(record, header);
          for (std::size_t j = 0; j < approx.size(); ++j) approx[j] = block[j] - approx[j];
          log.residual_norm = norm2(approx);
          continue;
        }

        if (!pursuit) pursuit.emplace(spec, options.pursuit);
        const SparseApproximation approx = options.method == EncodingMethod::SelfProjectedMP
                                               ? pursuit->spmp(block, rho)
                                               : pursuit->mp(block, rho);
        for (const auto& [index, value] : approx.coefficients) record.entries.push_back({index, value});
        log.selections = approx.steps.size();
        log.projection_iterations = approx.projection_iterations();
        log.residual_norm = approx.residual_norm;
      } catch (...) {
        failures[q] = std::current_exception();
      }
    }
  };

  unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  for (std::size_t q = 0; q < count; ++q) {
    if (!failures[q]) continue;
    try {
      std::rethrow_exception(failures[q]);
    } catch (const PursuitAborted& e) {
      throw PursuitAborted(e.what(), q);
    }
  }
  return result;
}

std::vector<double> reconstruct_block(const BlockRecord& record, const StreamHeader& header) {
  const DictionarySpec spec = header.dictionary();
  CoefficientMap coefficients;
  for (const auto& e : record.entries) {
    if (e.index < 1 || e.index > spec.atoms()) {
      throw FormatError("atom index " + std::to_string(e.index) + " outside [1, " +
                            std::to_string(spec.atoms()) + "]",
                        0);
    }
    coefficients[e.index] += e.value;
  }
  try {
    return synthesize(coefficients, spec);
  } catch (const DomainError& e) {
    throw FormatError(e.what(), 0);
  }
}

std::vector<double> decode(const EncodedStream& stream) {
  const auto& header = stream.header;
  if (stream.blocks.size() != header.block_count) {
    throw FormatError("block count does not match header", 0);
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(header.block_count) * header.block_size);
  for (const auto& record : stream.blocks) {
    const auto block = reconstruct_block(record, header);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(header.signal_length());
  return out;
}

namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { little(v, 2); }
  void u32(std::uint32_t v) { little(v, 4); }
  void f64(double v) { little(std::bit_cast<std::uint64_t>(v), 8); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void little(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

  std::uint8_t u8(const char* field) { return static_cast<std::uint8_t>(little(1, field)); }
  std::uint16_t u16(const char* field) { return static_cast<std::uint16_t>(little(2, field)); }
  std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(little(4, field)); }
  double f64(const char* field) { return std::bit_cast<double>(little(8, field)); }

 private:
  std::uint64_t little(std::size_t width, const char* field) {
    if (bytes_.size() - pos_ < width) {
      throw FormatError(std::string("truncated stream while reading ") + field, pos_);
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += width;
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr std::uint8_t kMagic[4] = {'S', 'S', 'C', '1'};

}  // namespace

std::vector<std::uint8_t> serialize(const EncodedStream& stream) {
  const auto& h = stream.header;
  ByteWriter w;
  for (auto b : kMagic) w.u8(b);
  w.u16(h.version);
  w.u8(static_cast<std::uint8_t>(h.kind));
  w.u32(h.atoms);
  w.u32(h.block_size);
  w.u32(h.block_count);
  w.u32(h.pad_len);
  w.u32(h.sample_rate);
  w.f64(h.target_snr);
  w.u8(static_cast<std::uint8_t>(h.method));
  const bool complex = h.kind == DictionaryCase::Fourier;
  for (const auto& block : stream.blocks) {
    w.u32(static_cast<std::uint32_t>(block.entries.size()));
    for (const auto& e : block.entries) {
      w.u32(e.index);
      w.f64(e.value.real());
      if (complex) w.f64(e.value.imag());
    }
  }
  return w.take();
}

EncodedStream parse_stream(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  for (auto expected : kMagic) {
    const std::size_t at = r.offset();
    if (r.u8("magic") != expected) throw FormatError("bad magic, not an SSC1 stream", at);
  }
  EncodedStream stream;
  auto& h = stream.header;
  std::size_t at = r.offset();
  h.version = r.u16("version");
  if (h.version != kStreamVersion) {
    throw FormatError("unsupported stream version " + std::to_string(h.version), at);
  }
  at = r.offset();
  const std::uint8_t kind = r.u8("case");
  if (kind < 1 || kind > 4) throw FormatError("invalid dictionary case " + std::to_string(kind), at);
  h.kind = static_cast<DictionaryCase>(kind);
  at = r.offset();
  h.atoms = r.u32("M");
  h.block_size = r.u32("block size");
  h.block_count = r.u32("block count");
  h.pad_len = r.u32("pad length");
  try {
    (void)h.dictionary();
  } catch (const DomainError& e) {
    throw FormatError(e.what(), at);
  }
  if ((h.block_count == 0 && h.pad_len != 0) || (h.block_count > 0 && h.pad_len >= h.block_size)) {
    throw FormatError("pad length inconsistent with block layout", at);
  }
  h.sample_rate = r.u32("sample rate");
  h.target_snr = r.f64("target snr");
  at = r.offset();
  const std::uint8_t method = r.u8("method");
  if (method > 2) throw FormatError("invalid method " + std::to_string(method), at);
  h.method = static_cast<EncodingMethod>(method);

  const bool complex = h.kind == DictionaryCase::Fourier;
  stream.blocks.reserve(std::min<std::size_t>(h.block_count, bytes.size()));
  for (std::uint32_t q = 0; q < h.block_count; ++q) {
    at = r.offset();
    const std::uint32_t k = r.u32("coefficient count");
    if (k > h.atoms) throw FormatError("block has more coefficients than atoms", at);
    BlockRecord block;
    block.entries.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
      at = r.offset();
      CoefficientEntry e;
      e.index = r.u32("atom index");
      if (e.index < 1 || e.index > h.atoms) {
        throw FormatError("atom index " + std::to_string(e.index) + " out of range", at);
      }
      if (!block.entries.empty() && e.index <= block.entries.back().index) {
        throw FormatError("atom indices not strictly increasing", at);
      }
      const double re = r.f64("coefficient");
      const double im = complex ? r.f64("coefficient") : 0.0;
      e.value = {re, im};
      block.entries.push_back(e);
    }
    stream.blocks.push_back(std::move(block));
  }
  if (!r.done()) throw FormatError("trailing bytes after last block", r.offset());
  return stream;
}

std::string to_json(const EncodedStream& stream) {
  using nlohmann::ordered_json;
  const auto& h = stream.header;
  ordered_json doc;
  doc["format"] = "SSC1";
  doc["version"] = h.version;
  doc["case"] = std::string(to_string(h.kind));
  doc["M"] = h.atoms;
  doc["block_size"] = h.block_size;
  doc["block_count"] = h.block_count;
  doc["pad_len"] = h.pad_len;
  doc["sample_rate"] = h.sample_rate;
  doc["target_snr"] = h.target_snr;
  doc["method"] = std::string(to_string(h.method));
  const bool complex = h.kind == DictionaryCase::Fourier;
  auto blocks = ordered_json::array();
  for (const auto& b : stream.blocks) {
    auto entries = ordered_json::array();
    for (const auto& e : b.entries) {
      if (complex) {
        entries.push_back({e.index, e.value.real(), e.value.imag()});
      } else {
        entries.push_back({e.index, e.value.real()});
      }
    }
    blocks.push_back({{"k", b.entries.size()}, {"entries", std::move(entries)}});
  }
  doc["blocks"] = std::move(blocks);
  return doc.dump(1) + "\n";
}

void write_stream(const std::string& path, const EncodedStream& stream) {
  const auto bytes = serialize(stream);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

EncodedStream read_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_stream(bytes);
}

}  // namespace trigmp
