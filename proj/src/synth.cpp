#include "trigmp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "trigmp/errors.hpp"
#include "trigmp/pursuit.hpp"

namespace trigmp::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

SignalKind parse_kind(std::string_view name) {
  if (name == "grid") return SignalKind::Grid;
  if (name == "nongrid") return SignalKind::NonGrid;
  if (name == "noise") return SignalKind::Noise;
  if (name == "sparse") return SignalKind::Sparse;
  throw DomainError("unknown synthetic signal type '" + std::string(name) + "'");
}

std::vector<double> grid_sinusoids(std::size_t length, std::size_t block_size, std::size_t partials,
                                   std::uint64_t seed) {
  if (block_size < 4) throw DomainError("grid_sinusoids: block size too small");
  std::mt19937_64 rng(seed);
  std::vector<double> out(length, 0.0);
  for (std::size_t p = 0; p < partials; ++p) {
    // Integer cycles per block, away from DC and Nyquist.
    const auto cycles = std::uniform_int_distribution<std::size_t>(1, block_size / 2 - 1)(rng);
    const double amplitude = uniform(rng, 0.1, 0.4);
    const double phase = uniform(rng, 0.0, kTwoPi);
    const double step = kTwoPi * static_cast<double>(cycles) / static_cast<double>(block_size);
    for (std::size_t j = 0; j < length; ++j) {
      const std::size_t local = j % block_size;
      out[j] += amplitude * std::cos(step * static_cast<double>(local) + phase);
    }
  }
  return out;
}

std::vector<double> decaying_mixture(std::size_t length, std::uint32_t sample_rate,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double fs = static_cast<double>(sample_rate);
  std::vector<double> out(length, 0.0);

  std::size_t onset = 0;
  while (onset < length) {
    const double f0 = 110.0 * std::pow(2.0, uniform(rng, 0.0, 3.0));
    const auto harmonics = std::uniform_int_distribution<int>(2, 5)(rng);
    const double decay = uniform(rng, 0.15, 0.6);  // seconds
    const double attack = 0.005 * fs;
    const double detune = uniform(rng, -0.004, 0.004);
    for (int h = 1; h <= harmonics; ++h) {
      const double freq = f0 * h * (1.0 + detune * h);
      if (freq >= 0.45 * fs) break;
      const double amplitude = uniform(rng, 0.3, 1.0) / h;
      const double phase = uniform(rng, 0.0, kTwoPi);
      const double tau = decay / std::sqrt(static_cast<double>(h));
      for (std::size_t j = onset; j < length; ++j) {
        const double t = static_cast<double>(j - onset);
        const double envelope = std::min(1.0, t / attack) * std::exp(-t / (tau * fs));
        if (envelope < 1e-4 && t > attack) break;
        out[j] += amplitude * envelope * std::sin(kTwoPi * freq * t / fs + phase);
      }
    }
    onset += static_cast<std::size_t>(uniform(rng, 0.15, 0.45) * fs);
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= 0.5 / peak;
  }
  return out;
}

std::vector<double> white_noise(std::size_t length, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(length);
  for (double& v : out) v = uniform(rng, -amplitude, amplitude);
  return out;
}

std::vector<double> sparse_combination(const DictionarySpec& spec, std::size_t blocks,
                                       std::size_t atoms, std::uint64_t seed) {
  const std::size_t range = selection_range(spec);
  if (atoms > range) throw DomainError("sparse_combination: more atoms than the dictionary holds");
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(blocks * spec.dim());
  std::vector<AtomIndex> pool(range);
  for (std::size_t n = 0; n < range; ++n) pool[n] = static_cast<AtomIndex>(n + 1);

  for (std::size_t q = 0; q < blocks; ++q) {
    std::shuffle(pool.begin(), pool.end(), rng);
    CoefficientMap coefficients;
    for (std::size_t k = 0; k < atoms; ++k) {
      const AtomIndex index = pool[k];
      const double magnitude = uniform(rng, 0.1, 1.0);
      Complex value = magnitude;
      if (spec.is_complex()) {
        if (const auto partner = conjugate_partner(index, spec.atoms())) {
          value = std::polar(magnitude, uniform(rng, 0.0, kTwoPi));
          coefficients[*partner] = std::conj(value);
        }
      }
      coefficients[index] = value;
    }
    const auto block = synthesize(coefficients, spec);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace trigmp::synth
