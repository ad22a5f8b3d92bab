#pragma once

// Quality, sparsity and complexity figures, and their CSV exports. Every
// export is comma-separated text with a single header line.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trigmp/codec.hpp"

namespace trigmp {

/// 10 log10(||f||^2 / ||f - approx||^2). +inf when the error norm is below
/// 1e-300. Throws DomainError for a zero signal or unequal lengths.
double snr_db(std::span<const double> signal, std::span<const double> approx);

/// N / K. Throws DomainError for K == 0.
double sparsity_ratio(std::size_t length, std::size_t coefficients);

/// Relative sparsity gain of SPMP over MP, in percent.
double gain_percent(double sr_spmp, double sr_mp);

struct KappaStats {
  /// kappa-bar_q per block; nullopt for blocks without selections.
  std::vector<std::optional<double>> per_block;
  /// Mean of the defined per-block averages (0 when none are defined).
  double double_average = 0.0;
};

/// Projection-iteration averages: first over the selections of a block,
/// then over blocks. Blocks with no selections are left out of the outer
/// average. Throws DomainError when `logs` is empty.
KappaStats kappa_stats(const std::vector<std::vector<std::size_t>>& logs);

struct BlockMetrics {
  std::size_t block = 0;
  std::size_t center = 0;          // sample index of the block centre
  std::size_t coefficients = 0;    // k_q
  double local_sr = 0.0;           // N_b / k_q, +inf when k_q == 0
  std::optional<double> kappa_bar;
  double residual_norm = 0.0;
};

struct MetricsReport {
  double snr = 0.0;
  double sr = 0.0;
  std::size_t total_coefficients = 0;
  std::size_t length = 0;
  std::size_t block_size = 0;
  std::optional<double> kappa_bar_bar;  // only known at encode time
  std::vector<BlockMetrics> blocks;
};

/// Builds the report by decoding `stream` against `original`. `logs`, when
/// present, supply the projection-iteration counts. A silent original that
/// decodes to silence reports SNR +inf.
MetricsReport make_report(const EncodedStream& stream, std::span<const double> original,
                          const std::vector<BlockLog>* logs = nullptr);

void write_metrics_csv(const MetricsReport& report, const std::string& path);
void write_blocks_csv(const MetricsReport& report, const std::string& path);
/// Rows (block centre, 1/sr_q).
void write_local_sparsity_csv(const MetricsReport& report, const std::string& path);

/// Rows (block, atom index, |c|^2, dB power max-normalized with a 1e-13 floor),
/// one per stored coefficient.
void sparse_spectrogram_export(const EncodedStream& stream, const std::string& path);
/// Dense atom-by-block matrix of the same powers in dB: max-normalized to 1,
/// 1e-13 added before the logarithm.
void sparse_spectrogram_matrix_export(const EncodedStream& stream, const std::string& path);

std::vector<double> hamming_window(std::size_t length);

/// |STFT|^2 with a Hamming window: result[frame][bin], bins 0..L/2. The hop
/// is round(L (1 - overlap)).
std::vector<std::vector<double>> stft_power(std::span<const double> signal, std::size_t window,
                                            double overlap);

/// STFT power in dB, max-normalized, written as one row per frequency bin.
void classic_spectrogram(std::span<const double> signal, std::size_t window, double overlap,
                         const std::string& path);

}  // namespace trigmp
