#pragma once

// Deterministic synthetic test signals.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "trigmp/dictionary.hpp"

namespace trigmp::synth {

enum class SignalKind { Grid, NonGrid, Noise, Sparse };

SignalKind parse_kind(std::string_view name);

/// Sinusoids completing a whole number of cycles per block of `block_size`
/// samples, so each block is spanned by a few Fourier basis atoms.
std::vector<double> grid_sinusoids(std::size_t length, std::size_t block_size, std::size_t partials,
                                   std::uint64_t seed);

/// Melodic surrogate: a sequence of notes, each a few harmonics at
/// off-grid frequencies under an exponentially decaying envelope.
std::vector<double> decaying_mixture(std::size_t length, std::uint32_t sample_rate,
                                     std::uint64_t seed);

std::vector<double> white_noise(std::size_t length, double amplitude, std::uint64_t seed);

/// Each block is a combination of `atoms` distinct dictionary atoms (Fourier:
/// conjugate pairs) with coefficient magnitudes in [0.1, 1].
std::vector<double> sparse_combination(const DictionarySpec& spec, std::size_t blocks,
                                       std::size_t atoms, std::uint64_t seed);

}  // namespace trigmp::synth
