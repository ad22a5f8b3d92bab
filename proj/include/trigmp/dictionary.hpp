#pragma once

// Redundant trigonometric dictionaries. Atoms are produced on demand from
// their index; no dictionary matrix is ever stored.
//
// Atom indices are 1-based throughout the library (and in the SSC1 file
// format), so index l of an M-atom dictionary lies in [1, M].

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trigmp {

using AtomIndex = std::uint32_t;

enum class DictionaryCase : std::uint8_t {
  Fourier = 1,     // I:   e^{i2pi(j-1)(n-1)/M} / sqrt(N)
  Cosine = 2,      // II:  cos(pi(2j-1)(n-1)/(2M)) / w^c(n)
  Sine = 3,        // III: sin(pi(2j-1)n/(2M)) / w^s(n)
  CosineSine = 4,  // IV:  cosine atoms [1, M/2] followed by sine atoms [M/2+1, M]
};

std::string_view to_string(DictionaryCase kind);
/// Accepts the CLI spellings "dft", "dct", "dst", "mixed".
DictionaryCase parse_case(std::string_view name);

class DictionarySpec {
 public:
  /// Throws DomainError unless atoms >= dim >= 1 (and atoms even for
  /// CosineSine).
  DictionarySpec(DictionaryCase kind, std::size_t atoms, std::size_t dim);

  DictionaryCase kind() const noexcept { return kind_; }
  /// M, the total atom count.
  std::size_t atoms() const noexcept { return atoms_; }
  /// N, the atom length (block length).
  std::size_t dim() const noexcept { return dim_; }
  double redundancy() const noexcept { return static_cast<double>(atoms_) / dim_; }
  bool is_complex() const noexcept { return kind_ == DictionaryCase::Fourier; }
  /// Size of each sub-dictionary: M/2 for CosineSine, M otherwise.
  std::size_t sub_atoms() const noexcept {
    return kind_ == DictionaryCase::CosineSine ? atoms_ / 2 : atoms_;
  }
  /// M == N: every case is an orthonormal basis there.
  bool is_basis() const noexcept { return atoms_ == dim_; }

  friend bool operator==(const DictionarySpec&, const DictionarySpec&) = default;

 private:
  DictionaryCase kind_;
  std::size_t atoms_;
  std::size_t dim_;
};

/// One unit-norm atom. `im` is filled only for the Fourier dictionary.
struct Atom {
  AtomIndex index = 0;
  std::vector<double> re;
  std::vector<double> im;

  bool is_complex() const noexcept { return !im.empty(); }
  double norm() const;
};

/// Norm of the unnormalized cosine atom cos(pi(2j-1)(n-1)/(2M)), j=1..N.
double weight_cos(std::size_t n, std::size_t atoms, std::size_t dim);

/// Norm of the unnormalized sine atom sin(pi(2j-1)n/(2M)), j=1..N. The
/// closed form is singular at n == M; that point is summed directly.
double weight_sin(std::size_t n, std::size_t atoms, std::size_t dim);

Atom make_atom(AtomIndex index, const DictionarySpec& spec);

/// Fourier dictionary only: the index whose atom is the complex conjugate of
/// atom `index`, or nullopt for the self-conjugate atoms (1 and M/2+1).
std::optional<AtomIndex> conjugate_partner(AtomIndex index, std::size_t atoms);

/// Representative of a conjugate pair: the smaller of index and its partner.
/// Identity for real dictionaries.
AtomIndex canonical_index(AtomIndex index, const DictionarySpec& spec);

/// Number of candidate indices examined by a selection: M/2+1 for Fourier
/// (the remaining half mirrors it), M otherwise.
std::size_t selection_range(const DictionarySpec& spec);

}  // namespace trigmp
