#pragma once

// Greedy pursuits over the implicit trigonometric dictionaries: plain
// Matching Pursuit and Self-Projected Matching Pursuit, both with inner
// products computed through zero-padded FFTs.
//
// Fourier dictionaries act on real signals, so their atoms are handled in
// conjugate pairs (l, M-l+2). Selection only looks at the canonical member
// of each pair (l <= M/2+1); the partner is added to the support with the
// conjugate coefficient. Atoms 1 and M/2+1 are self-conjugate and carry real
// coefficients.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "trigmp/dictionary.hpp"
#include "trigmp/fft.hpp"

namespace trigmp {

using CoefficientMap = std::map<AtomIndex, Complex>;

struct Selection {
  AtomIndex index = 0;
  Complex coefficient;
};

struct PursuitOptions {
  /// Absolute projection tolerance. Zero means epsilon_factor * rho.
  double epsilon = 0.0;
  double epsilon_factor = 1e-4;
  /// A projection aborts after this many iterations per supported atom.
  std::size_t projection_cap_per_atom = 10000;
  /// Re-select over the support by direct inner products while the support
  /// is no larger than direct_threshold; otherwise use the FFT.
  bool direct_reselection = true;
  /// Zero means (M/N) log2 M.
  double direct_threshold = 0.0;
  /// Supports up to this size are projected with inner products updated
  /// through the Gram matrix of the supported atoms; larger ones recompute
  /// them on every iteration.
  std::size_t gram_limit = 2048;
  /// Abort when the residual norm shrinks by less than this relative amount
  /// over `stagnation_window` consecutive selections.
  std::size_t stagnation_window = 50;
  double stagnation_tolerance = 1e-12;
};

/// One pass of the outer selection loop.
struct SelectionStep {
  AtomIndex index = 0;       // canonical index chosen by the MP criterion
  Complex coefficient;       // <d_index, R> at selection time
  double residual_before = 0.0;
  double residual_selected = 0.0;  // after subtracting the selected term
  double residual_after = 0.0;     // after the projection (== selected for MP)
  std::size_t projection_iterations = 0;
};

struct SparseApproximation {
  /// Selected indices in insertion order; Fourier partners included.
  std::vector<AtomIndex> support;
  CoefficientMap coefficients;
  std::vector<double> approximation;
  std::vector<double> residual;
  double residual_norm = 0.0;
  std::vector<SelectionStep> steps;

  std::vector<AtomIndex> selection_order() const;
  std::vector<std::size_t> projection_iterations() const;
};

/// Pursuit workspace bound to one dictionary: FFT engine plus a cache of the
/// atoms selected so far. One instance per thread.
class Pursuit {
 public:
  explicit Pursuit(const DictionarySpec& spec, PursuitOptions options = {});

  const DictionarySpec& spec() const noexcept { return spec_; }
  const PursuitOptions& options() const noexcept { return options_; }

  /// MP criterion over the whole dictionary. nullopt when every inner
  /// product is zero (the residual is already exact).
  std::optional<Selection> select(std::span<const double> residual);

  /// MP criterion restricted to `support` (partners are folded onto their
  /// canonical index). Throws DomainError on an empty support.
  Selection reselect(std::span<const double> residual, std::span<const AtomIndex> support);

  /// Self-projection: runs MP over `support` on `residual` until the
  /// re-selected coefficient drops to `epsilon`, accumulating into
  /// `coefficients`. Returns the iteration count.
  std::size_t project(std::span<double> residual, CoefficientMap& coefficients,
                      std::span<const AtomIndex> support, double epsilon);

  SparseApproximation spmp(std::span<const double> signal, double rho);
  SparseApproximation mp(std::span<const double> signal, double rho);

  const Atom& atom(AtomIndex index);
  void clear_cache();

 private:
  SparseApproximation run(std::span<const double> signal, double rho, bool self_project);
  std::vector<AtomIndex> canonical_support(std::span<const AtomIndex> support) const;
  Selection finalize(AtomIndex index, Complex value) const;
  Complex direct_inner_product(AtomIndex index, std::span<const double> residual);
  void subtract(std::span<double> residual, const Selection& term);
  void accumulate(CoefficientMap& coefficients, const Selection& term) const;
  std::size_t project_recomputed(std::span<double> residual, CoefficientMap& coefficients,
                                 std::span<const AtomIndex> candidates, double epsilon,
                                 std::size_t cap);
  std::size_t gram_slot(AtomIndex index);

  DictionarySpec spec_;
  PursuitOptions options_;
  InnerProductEngine engine_;
  InnerProductVector products_;
  std::unordered_map<AtomIndex, Atom> cache_;
  // Gram entries between cached atoms, by slot: gram_[a][b] = <d_a, d_b>
  // and, for Fourier atoms, conj_gram_[a][b] = <d_a, conj(d_b)>.
  std::unordered_map<AtomIndex, std::size_t> slots_;
  std::vector<AtomIndex> slot_atoms_;
  std::vector<std::vector<Complex>> gram_;
  std::vector<std::vector<Complex>> conj_gram_;
  double direct_threshold_;
};

std::optional<Selection> select_atom(std::span<const double> residual, const DictionarySpec& spec);
Selection reselect_atom(std::span<const double> residual, const DictionarySpec& spec,
                        std::span<const AtomIndex> support);
std::size_t project_mp(std::span<double> residual, CoefficientMap& coefficients,
                       std::span<const AtomIndex> support, const DictionarySpec& spec,
                       double epsilon, const PursuitOptions& options = {});
SparseApproximation spmp(std::span<const double> signal, const DictionarySpec& spec, double rho,
                         const PursuitOptions& options = {});
SparseApproximation mp(std::span<const double> signal, const DictionarySpec& spec, double rho,
                       const PursuitOptions& options = {});

/// sum_n c(n) d_n, real part. Fourier coefficient maps must hold both members
/// of each conjugate pair.
std::vector<double> synthesize(const CoefficientMap& coefficients, const DictionarySpec& spec);

}  // namespace trigmp
