#include "trigmp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "trigmp/errors.hpp"
#include "trigmp/fft.hpp"

namespace trigmp {

namespace {

constexpr double kPowerFloor = 1e-13;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "nan"; }

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

double to_db(double normalized_power) { return 10.0 * std::log10(normalized_power + kPowerFloor); }

}  // namespace

double snr_db(std::span<const double> signal, std::span<const double> approx) {
  if (signal.size() != approx.size()) throw DomainError("snr: length mismatch");
  double energy = 0.0;
  double error = 0.0;
  for (std::size_t j = 0; j < signal.size(); ++j) {
    energy += signal[j] * signal[j];
    const double d = signal[j] - approx[j];
    error += d * d;
  }
  if (energy == 0.0) throw DomainError("snr: zero signal");
  if (std::sqrt(error) < 1e-300) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(energy / error);
}

double sparsity_ratio(std::size_t length, std::size_t coefficients) {
  if (coefficients == 0) throw DomainError("sparsity ratio undefined for zero coefficients");
  return static_cast<double>(length) / static_cast<double>(coefficients);
}

double gain_percent(double sr_spmp, double sr_mp) {
  if (!(sr_mp > 0.0)) throw DomainError("gain: SR(MP) must be positive");
  return (sr_spmp - sr_mp) / sr_mp * 100.0;
}

KappaStats kappa_stats(const std::vector<std::vector<std::size_t>>& logs) {
  if (logs.empty()) throw DomainError("kappa_stats: no blocks");
  KappaStats stats;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& log : logs) {
    if (log.empty()) {
      stats.per_block.emplace_back();
      continue;
    }
    double acc = 0.0;
    for (std::size_t k : log) acc += static_cast<double>(k);
    const double mean = acc / static_cast<double>(log.size());
    stats.per_block.emplace_back(mean);
    sum += mean;
    ++defined;
  }
  stats.double_average = defined > 0 ? sum / static_cast<double>(defined) : 0.0;
  return stats;
}

MetricsReport make_report(const EncodedStream& stream, std::span<const double> original,
                          const std::vector<BlockLog>* logs) {
  const auto& h = stream.header;
  if (original.size() != h.signal_length()) {
    throw DomainError("report: original has " + std::to_string(original.size()) +
                      " samples, stream describes " + std::to_string(h.signal_length()));
  }
  if (logs != nullptr && logs->size() != stream.blocks.size()) {
    throw DomainError("report: log count does not match block count");
  }

  MetricsReport report;
  report.length = original.size();
  report.block_size = h.block_size;
  report.total_coefficients = stream.total_coefficients();
  const auto decoded = decode(stream);
  const bool silent = std::all_of(original.begin(), original.end(), [](double x) { return x == 0.0; });
  // An all-zero input decoded from an all-empty stream is reproduced exactly.
  report.snr = silent && std::all_of(decoded.begin(), decoded.end(), [](double x) { return x == 0.0; })
                   ? std::numeric_limits<double>::infinity()
                   : snr_db(original, decoded);
  report.sr = report.total_coefficients > 0
                  ? sparsity_ratio(report.length, report.total_coefficients)
                  : std::numeric_limits<double>::infinity();

  std::optional<KappaStats> kappa;
  if (logs != nullptr && !logs->empty()) {
    std::vector<std::vector<std::size_t>> iterations;
    for (const auto& log : *logs) iterations.push_back(log.projection_iterations);
    kappa = kappa_stats(iterations);
    report.kappa_bar_bar = kappa->double_average;
  }

  const std::size_t nb = h.block_size;
  for (std::size_t q = 0; q < stream.blocks.size(); ++q) {
    BlockMetrics m;
    m.block = q;
    m.center = q * nb + nb / 2;
    m.coefficients = stream.blocks[q].entries.size();
    m.local_sr = m.coefficients > 0 ? static_cast<double>(nb) / static_cast<double>(m.coefficients)
                                    : std::numeric_limits<double>::infinity();
    if (kappa) m.kappa_bar = kappa->per_block[q];
    double err = 0.0;
    const std::size_t end = std::min((q + 1) * nb, original.size());
    for (std::size_t j = q * nb; j < end; ++j) {
      const double d = original[j] - decoded[j];
      err += d * d;
    }
    m.residual_norm = std::sqrt(err);
    report.blocks.push_back(m);
  }
  return report;
}

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
  auto out = open_csv(path);
  out << "snr_db,sr,K,N,Q,block_size,kappa_bar_bar\n";
  out << num(report.snr) << ',' << num(report.sr) << ',' << report.total_coefficients << ','
      << report.length << ',' << report.blocks.size() << ',' << report.block_size << ','
      << num(report.kappa_bar_bar) << '\n';
  finish(out, path);
}

void write_blocks_csv(const MetricsReport& report, const std::string& path) {
  auto out = open_csv(path);
  out << "block,center,k_q,sr_q,kappa_bar_q,residual_norm\n";
  for (const auto& b : report.blocks) {
    out << b.block << ',' << b.center << ',' << b.coefficients << ',' << num(b.local_sr) << ','
        << num(b.kappa_bar) << ',' << num(b.residual_norm) << '\n';
  }
  finish(out, path);
}

void write_local_sparsity_csv(const MetricsReport& report, const std::string& path) {
  auto out = open_csv(path);
  out << "center,inverse_sr_q\n";
  for (const auto& b : report.blocks) {
    out << b.center << ',' << num(static_cast<double>(b.coefficients) / report.block_size) << '\n';
  }
  finish(out, path);
}

namespace {

double max_power(const EncodedStream& stream) {
  double peak = 0.0;
  for (const auto& b : stream.blocks) {
    for (const auto& e : b.entries) peak = std::max(peak, std::norm(e.value));
  }
  return peak;
}

}  // namespace

void sparse_spectrogram_export(const EncodedStream& stream, const std::string& path) {
  auto out = open_csv(path);
  out << "block,atom,power,power_db\n";
  const double peak = max_power(stream);
  for (std::size_t q = 0; q < stream.blocks.size(); ++q) {
    for (const auto& e : stream.blocks[q].entries) {
      const double power = std::norm(e.value);
      out << q << ',' << e.index << ',' << num(power) << ',' << num(to_db(power / peak)) << '\n';
    }
  }
  finish(out, path);
}

void sparse_spectrogram_matrix_export(const EncodedStream& stream, const std::string& path) {
  auto out = open_csv(path);
  const std::size_t blocks = stream.blocks.size();
  out << "atom";
  for (std::size_t q = 0; q < blocks; ++q) out << ",b" << q;
  out << '\n';
  if (blocks == 0) {
    finish(out, path);
    return;
  }
  const double peak = max_power(stream);
  const std::size_t atoms = stream.header.atoms;
  std::vector<double> column(static_cast<std::size_t>(atoms) * blocks, 0.0);
  for (std::size_t q = 0; q < blocks; ++q) {
    for (const auto& e : stream.blocks[q].entries) {
      column[(e.index - 1) * blocks + q] = peak > 0.0 ? std::norm(e.value) / peak : 0.0;
    }
  }
  for (std::size_t n = 0; n < atoms; ++n) {
    out << n + 1;
    for (std::size_t q = 0; q < blocks; ++q) out << ',' << num(to_db(column[n * blocks + q]));
    out << '\n';
  }
  finish(out, path);
}

std::vector<double> hamming_window(std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length < 2) return w;
  for (std::size_t j = 0; j < length; ++j) {
    w[j] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                  static_cast<double>(length - 1));
  }
  return w;
}

std::vector<std::vector<double>> stft_power(std::span<const double> signal, std::size_t window,
                                            double overlap) {
  if (window < 2 || window > signal.size()) {
    throw DomainError("spectrogram: window must lie in [2, signal length]");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("spectrogram: overlap must be in [0, 1)");
  const auto hop = static_cast<std::size_t>(
      std::max(1.0, std::round(static_cast<double>(window) * (1.0 - overlap))));
  const std::size_t frames = (signal.size() - window) / hop + 1;
  const auto w = hamming_window(window);

  std::vector<std::vector<double>> power(frames);
  std::vector<double> frame(window);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t j = 0; j < window; ++j) frame[j] = w[j] * signal[t * hop + j];
    const auto spectrum = padded_dft(frame, window);
    auto& row = power[t];
    row.resize(window / 2 + 1);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = std::norm(spectrum[k]);
  }
  return power;
}

void classic_spectrogram(std::span<const double> signal, std::size_t window, double overlap,
                         const std::string& path) {
  const auto power = stft_power(signal, window, overlap);
  double peak = 0.0;
  for (const auto& row : power) {
    for (double p : row) peak = std::max(peak, p);
  }
  auto out = open_csv(path);
  out << "bin";
  for (std::size_t t = 0; t < power.size(); ++t) out << ",f" << t;
  out << '\n';
  const std::size_t bins = window / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k) {
    out << k;
    for (const auto& row : power) out << ',' << num(to_db(peak > 0.0 ? row[k] / peak : 0.0));
    out << '\n';
  }
  finish(out, path);
}

}  // namespace trigmp
