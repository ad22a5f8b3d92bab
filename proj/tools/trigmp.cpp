// trigmp: sparse block coding of audio over redundant trigonometric
// dictionaries.
//
// Exit status: 0 success, 2 usage/format/IO error, 3 pursuit abort.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trigmp/codec.hpp"
#include "trigmp/dictionary.hpp"
#include "trigmp/errors.hpp"
#include "trigmp/metrics.hpp"
#include "trigmp/synth.hpp"
#include "trigmp/wav.hpp"

namespace {

using namespace trigmp;

constexpr int kExitUsage = 2;
constexpr int kExitAbort = 3;

struct CodingFlags {
  std::string kind = "mixed";
  double redundancy = 4.0;
  double snr = 35.0;
  std::size_t block_size = 8192;
  std::string method = "spmp";
  double epsilon = 1e-4;
  unsigned jobs = 0;
  CLI::Option* redundancy_opt = nullptr;
};

void add_coding_flags(CLI::App& cmd, CodingFlags& f, bool with_method) {
  cmd.add_option("--case", f.kind, "Dictionary: dft, dct, dst or mixed")
      ->check(CLI::IsMember({"dft", "dct", "dst", "mixed"}))
      ->capture_default_str();
  f.redundancy_opt = cmd.add_option("--redundancy", f.redundancy, "Redundancy r = M / N_b (>= 1)")
                         ->check(CLI::Range(1.0, 1e6))
                         ->capture_default_str();
  cmd.add_option("--snr", f.snr, "Target SNR in dB")->capture_default_str();
  if (with_method) {
    cmd.add_option("--block-size", f.block_size, "Block length N_b")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24))
        ->capture_default_str();
    cmd.add_option("--method", f.method, "mp, spmp or basis")
        ->check(CLI::IsMember({"mp", "spmp", "basis"}))
        ->capture_default_str();
  }
  cmd.add_option("--epsilon", f.epsilon,
                 "Projection tolerance as a fraction of each block's residual target")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--jobs", f.jobs, "Worker threads (0 = all cores)")->capture_default_str();
}

/// M = round(r N_b), rounded to the nearest even value for the mixed case.
std::size_t atom_count(DictionaryCase kind, double redundancy, std::size_t block_size) {
  const double exact = redundancy * static_cast<double>(block_size);
  if (kind == DictionaryCase::CosineSine) {
    return static_cast<std::size_t>(std::llround(exact / 2.0)) * 2;
  }
  return static_cast<std::size_t>(std::llround(exact));
}

struct Plan {
  DictionarySpec spec;
  EncodeOptions options;
};

Plan make_plan(DictionaryCase kind, EncodingMethod method, double redundancy, bool redundancy_given,
               std::size_t block_size, const CodingFlags& f, std::uint32_t rate) {
  if (method == EncodingMethod::BasisThreshold) {
    if (redundancy_given && redundancy != 1.0) {
      throw DomainError("--method basis needs an orthonormal basis; drop --redundancy or use 1");
    }
    redundancy = 1.0;
  }
  EncodeOptions options;
  options.method = method;
  options.target_snr = f.snr;
  options.sample_rate = rate;
  options.jobs = f.jobs;
  options.pursuit.epsilon_factor = f.epsilon;
  return {DictionarySpec(kind, atom_count(kind, redundancy, block_size), block_size), options};
}

WavAudio load_audio(const std::string& path) {
  auto audio = read_wav(path);
  if (audio.channels > 1) {
    std::cerr << "warning: " << path << " has " << audio.channels
              << " channels; encoding channel 0 only\n";
  }
  if (audio.samples.empty()) throw FormatError("WAV file holds no samples", 0);
  return audio;
}

void describe(const DictionarySpec& spec, EncodingMethod method) {
  std::cerr << "dictionary " << to_string(spec.kind()) << ", N_b=" << spec.dim()
            << ", M=" << spec.atoms() << " (r=" << spec.redundancy() << "), method "
            << to_string(method) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  CodingFlags coding;
  std::string input;
  std::string output;
  std::string metrics;
  std::string blocks;
  std::string json;
};

int run_encode(const EncodeArgs& a) {
  const auto audio = load_audio(a.input);
  const auto plan = make_plan(parse_case(a.coding.kind), parse_method(a.coding.method),
                              a.coding.redundancy, a.coding.redundancy_opt->count() > 0,
                              a.coding.block_size, a.coding, audio.sample_rate);
  describe(plan.spec, plan.options.method);

  const auto result = encode(audio.samples, plan.spec, plan.options);
  write_stream(a.output, result.stream);

  const auto report = make_report(result.stream, audio.samples, &result.logs);
  write_metrics_csv(report, a.metrics.empty() ? a.output + ".metrics.csv" : a.metrics);
  if (!a.blocks.empty()) write_blocks_csv(report, a.blocks);
  if (!a.json.empty()) write_text(a.json, to_json(result.stream));

  std::cout << "snr_db=" << fmt(report.snr) << " sr=" << fmt(report.sr)
            << " K=" << report.total_coefficients;
  if (report.kappa_bar_bar) std::cout << " kappa_bar_bar=" << fmt(*report.kappa_bar_bar);
  std::cout << '\n';
  return 0;
}

// ---------------------------------------------------------------- decode

int run_decode(const std::string& input, const std::string& output, const std::string& json) {
  const auto stream = read_stream(input);
  write_wav(output, decode(stream), stream.header.sample_rate);
  if (!json.empty()) write_text(json, to_json(stream));
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string stream;
  std::string input;
  std::string prefix = "analysis";
  std::size_t window = 4096;
  double overlap = 0.5;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto stream = read_stream(a.stream);
  const auto audio = load_audio(a.input);
  const auto report = make_report(stream, audio.samples);
  write_metrics_csv(report, a.prefix + "_metrics.csv");
  write_blocks_csv(report, a.prefix + "_blocks.csv");
  write_local_sparsity_csv(report, a.prefix + "_local_sparsity.csv");
  sparse_spectrogram_export(stream, a.prefix + "_sparse_spectrogram.csv");
  sparse_spectrogram_matrix_export(stream, a.prefix + "_sparse_spectrogram_matrix.csv");
  const std::size_t window = std::min(a.window, audio.samples.size());
  if (window >= 2) {
    classic_spectrogram(audio.samples, window, a.overlap, a.prefix + "_spectrogram.csv");
  } else {
    std::cerr << "warning: signal too short for a spectrogram\n";
  }
  std::cout << "snr_db=" << fmt(report.snr) << " sr=" << fmt(report.sr)
            << " K=" << report.total_coefficients << '\n';
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  CodingFlags coding;
  std::string input;
  std::string output = "compare.csv";
  std::string gain;
  std::vector<std::size_t> block_sizes{512, 1024, 2048, 4096, 8192, 16384};
  std::vector<std::string> methods{"basis", "mp", "spmp"};
  std::string basis_case = "dct";
};

int run_compare(const CompareArgs& a) {
  const auto audio = load_audio(a.input);
  std::ostringstream rows;
  rows << "block_size,method,case,M,K,sr,kappa_bar_bar,snr_db,seconds,status\n";
  std::ostringstream gains;
  gains << "block_size,sr_mp,sr_spmp,gain_percent\n";
  bool failed = false;

  for (std::size_t nb : a.block_sizes) {
    std::optional<double> sr_mp;
    std::optional<double> sr_spmp;
    for (const auto& name : a.methods) {
      const auto method = parse_method(name);
      const auto kind = parse_case(method == EncodingMethod::BasisThreshold ? a.basis_case
                                                                            : a.coding.kind);
      const auto plan = make_plan(kind, method, a.coding.redundancy, false, nb, a.coding,
                                  audio.sample_rate);
      rows << nb << ',' << name << ',' << to_string(kind) << ',' << plan.spec.atoms() << ',';
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto result = encode(audio.samples, plan.spec, plan.options);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto report = make_report(result.stream, audio.samples, &result.logs);
        rows << report.total_coefficients << ',' << fmt(report.sr) << ','
             << (report.kappa_bar_bar ? fmt(*report.kappa_bar_bar) : "nan") << ','
             << fmt(report.snr) << ',' << fmt(seconds) << ",ok\n";
        if (method == EncodingMethod::MatchingPursuit) sr_mp = report.sr;
        if (method == EncodingMethod::SelfProjectedMP) sr_spmp = report.sr;
      } catch (const PursuitAborted& e) {
        failed = true;
        std::cerr << "N_b=" << nb << " " << name << ": " << e.what() << '\n';
        rows << ",nan,nan,nan,nan,failed\n";
      }
    }
    if (sr_mp && sr_spmp) {
      gains << nb << ',' << fmt(*sr_mp) << ',' << fmt(*sr_spmp) << ','
            << fmt(gain_percent(*sr_spmp, *sr_mp)) << '\n';
    }
  }
  write_text(a.output, rows.str());
  write_text(a.gain.empty() ? a.output + ".gain.csv" : a.gain, gains.str());
  std::cout << rows.str();
  return failed ? kExitAbort : 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string type = "nongrid";
  std::string output;
  std::uint64_t seed = 1;
  std::size_t length = 44100;
  std::uint32_t rate = 44100;
  std::size_t block_size = 4096;
  std::size_t atoms = 5;
  std::string kind = "mixed";
  double redundancy = 4.0;
};

int run_synth(const SynthArgs& a) {
  std::vector<double> signal;
  switch (synth::parse_kind(a.type)) {
    case synth::SignalKind::Grid:
      signal = synth::grid_sinusoids(a.length, a.block_size, a.atoms, a.seed);
      break;
    case synth::SignalKind::NonGrid:
      signal = synth::decaying_mixture(a.length, a.rate, a.seed);
      break;
    case synth::SignalKind::Noise:
      signal = synth::white_noise(a.length, 0.5, a.seed);
      break;
    case synth::SignalKind::Sparse: {
      const auto kind = parse_case(a.kind);
      const DictionarySpec spec(kind, atom_count(kind, a.redundancy, a.block_size), a.block_size);
      const std::size_t blocks = std::max<std::size_t>(1, (a.length + a.block_size - 1) / a.block_size);
      signal = synth::sparse_combination(spec, blocks, a.atoms, a.seed);
      signal.resize(a.length);
      break;
    }
  }
  write_wav(a.output, signal, a.rate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse block coding of audio over redundant trigonometric dictionaries"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode_cmd = app.add_subcommand("encode", "Encode a WAV file into an SSC1 stream");
  encode_cmd->add_option("-i,--input", enc.input, "Input WAV")->required();
  encode_cmd->add_option("-o,--output", enc.output, "Output SSC1 stream")->required();
  encode_cmd->add_option("--metrics", enc.metrics, "Metrics CSV (default <output>.metrics.csv)");
  encode_cmd->add_option("--blocks", enc.blocks, "Per-block metrics CSV");
  encode_cmd->add_option("--json", enc.json, "JSON dump of the stream");
  add_coding_flags(*encode_cmd, enc.coding, true);

  std::string dec_in;
  std::string dec_out;
  std::string dec_json;
  auto* decode_cmd = app.add_subcommand("decode", "Reconstruct a WAV file from an SSC1 stream");
  decode_cmd->add_option("-i,--input", dec_in, "Input SSC1 stream")->required();
  decode_cmd->add_option("-o,--output", dec_out, "Output WAV")->required();
  decode_cmd->add_option("--json", dec_json, "JSON dump of the stream");

  AnalyzeArgs ana;
  auto* analyze_cmd = app.add_subcommand("analyze", "Metrics and spectrograms for a stream");
  analyze_cmd->add_option("--stream", ana.stream, "SSC1 stream")->required();
  analyze_cmd->add_option("-i,--input", ana.input, "Original WAV")->required();
  analyze_cmd->add_option("--prefix", ana.prefix, "Output file prefix")->capture_default_str();
  analyze_cmd->add_option("--window", ana.window, "Spectrogram window length")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24))
      ->capture_default_str();
  analyze_cmd->add_option("--overlap", ana.overlap, "Spectrogram window overlap")
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Sweep block sizes and methods");
  compare_cmd->add_option("-i,--input", cmp.input, "Input WAV")->required();
  compare_cmd->add_option("-o,--output", cmp.output, "Result CSV")->capture_default_str();
  compare_cmd->add_option("--gain", cmp.gain, "Gain CSV (default <output>.gain.csv)");
  compare_cmd->add_option("--block-sizes", cmp.block_sizes, "Block lengths to sweep")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  compare_cmd->add_option("--methods", cmp.methods, "Methods to sweep")
      ->delimiter(',')
      ->check(CLI::IsMember({"mp", "spmp", "basis"}));
  compare_cmd->add_option("--basis-case", cmp.basis_case, "Dictionary for the basis method")
      ->check(CLI::IsMember({"dft", "dct", "dst", "mixed"}))
      ->capture_default_str();
  add_coding_flags(*compare_cmd, cmp.coding, false);

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic test signal");
  synth_cmd->add_option("--type", syn.type, "grid, nongrid, noise or sparse")
      ->check(CLI::IsMember({"grid", "nongrid", "noise", "sparse"}))
      ->capture_default_str();
  synth_cmd->add_option("-o,--output", syn.output, "Output WAV")->required();
  synth_cmd->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--length", syn.length, "Samples")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 28))
      ->capture_default_str();
  synth_cmd->add_option("--sample-rate", syn.rate, "Hz")
      ->check(CLI::Range(1u, 1000000u))
      ->capture_default_str();
  synth_cmd->add_option("--block-size", syn.block_size, "Block length (grid, sparse)")
      ->check(CLI::Range(std::size_t{4}, std::size_t{1} << 24))
      ->capture_default_str();
  synth_cmd->add_option("--atoms", syn.atoms, "Partials (grid) or atoms per block (sparse)")
      ->capture_default_str();
  synth_cmd->add_option("--case", syn.kind, "Dictionary for sparse signals")
      ->check(CLI::IsMember({"dft", "dct", "dst", "mixed"}))
      ->capture_default_str();
  synth_cmd->add_option("--redundancy", syn.redundancy, "Redundancy for sparse signals")
      ->check(CLI::Range(1.0, 1e6))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*encode_cmd) return run_encode(enc);
    if (*decode_cmd) return run_decode(dec_in, dec_out, dec_json);
    if (*analyze_cmd) return run_analyze(ana);
    if (*compare_cmd) return run_compare(cmp);
    if (*synth_cmd) return run_synth(syn);
  } catch (const PursuitAborted& e) {
    std::cerr << "error: pursuit aborted: " << e.what() << '\n';
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
