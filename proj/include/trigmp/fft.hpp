#pragma once

// Zero-padded DFTs and the FFT route to dictionary inner products.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "trigmp/dictionary.hpp"

namespace trigmp {

namespace detail {
class RealTransform;
}

using Complex = std::complex<double>;

/// F(y, n, M) = sum_j y(j) e^{-i 2 pi (n-1)(j-1) / M} for n = 1..M, computed
/// by zero-padding y to length M. Throws DomainError if M < y.size().
std::vector<Complex> padded_dft(std::span<const double> y, std::size_t length);
std::vector<Complex> padded_dft(std::span<const Complex> y, std::size_t length);

/// <d_n, R> for every atom of a dictionary.
///
/// Fourier fills `fourier` (M entries); Cosine fills `cosine` (M); Sine fills
/// `sine` (M, entry k-1 belongs to sine atom k); CosineSine fills both
/// `cosine` and `sine` with M/2 entries each.
struct InnerProductVector {
  DictionaryCase kind = DictionaryCase::Cosine;
  std::vector<Complex> fourier;
  std::vector<double> cosine;
  std::vector<double> sine;

  std::size_t size() const noexcept;
  /// Inner product with atom `index` (1-based), promoted to complex.
  Complex at(AtomIndex index) const;
};

/// Reusable FFT workspace for one dictionary. Holds the plan, the padded
/// buffers and the per-bin phase and weight tables. Not safe for concurrent
/// use; give each worker its own engine.
class InnerProductEngine {
 public:
  explicit InnerProductEngine(const DictionarySpec& spec);
  ~InnerProductEngine();
  InnerProductEngine(InnerProductEngine&&) noexcept;
  InnerProductEngine& operator=(InnerProductEngine&&) noexcept;
  InnerProductEngine(const InnerProductEngine&) = delete;
  InnerProductEngine& operator=(const InnerProductEngine&) = delete;

  const DictionarySpec& spec() const noexcept { return spec_; }

  void compute(std::span<const double> residual, InnerProductVector& out);
  InnerProductVector compute(std::span<const double> residual);

 private:
  DictionarySpec spec_;
  std::unique_ptr<detail::RealTransform> transform_;
  std::vector<Complex> phase_;      // e^{-i pi k / (2M')}, k = 0..M'
  std::vector<double> inv_cos_;     // 1 / w^c(n), n = 1..M'
  std::vector<double> inv_sin_;     // 1 / w^s(n), n = 1..M'
};

/// One-shot convenience wrapper around InnerProductEngine.
InnerProductVector inner_products(std::span<const double> residual, const DictionarySpec& spec);

}  // namespace trigmp
