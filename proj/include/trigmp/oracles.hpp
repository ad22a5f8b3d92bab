#pragma once

// Slow reference implementations over an explicitly stored dictionary. They
// share only make_atom with the fast path and exist to check it.

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

#include "trigmp/dictionary.hpp"
#include "trigmp/fft.hpp"
#include "trigmp/pursuit.hpp"

namespace trigmp::oracle {

/// Selected atoms are (numerically) linearly dependent.
class DegenerateSelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxExplicitDim = 1024;
inline constexpr double kMaxCondition = 1e12;

/// All M atoms as the columns of an N x M complex matrix.
class ExplicitDictionary {
 public:
  /// Throws DomainError when N exceeds kMaxExplicitDim.
  explicit ExplicitDictionary(const DictionarySpec& spec);

  const DictionarySpec& spec() const noexcept { return spec_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return atoms_; }
  Eigen::VectorXcd atom(AtomIndex index) const { return atoms_.col(index - 1); }

 private:
  DictionarySpec spec_;
  Eigen::MatrixXcd atoms_;
};

/// Entry n = sum_j conj(d_n(j)) R(j), by plain summation.
InnerProductVector direct_inner_products(std::span<const double> residual,
                                         const ExplicitDictionary& dict);

/// Coefficients of the orthogonal projection of f onto span{d_n : n in
/// support}, from a column-pivoted QR of the selected atoms. Throws
/// DegenerateSelection when their condition number exceeds kMaxCondition.
CoefficientMap least_squares_projection(std::span<const double> signal,
                                        std::span<const AtomIndex> support,
                                        const ExplicitDictionary& dict);

/// Orthogonal Matching Pursuit with the coefficients re-solved by least
/// squares at every step. Uses the same candidate set, tie rule and Fourier
/// pairing as the fast pursuit so selection orders are comparable.
///
/// When `margins` is given it receives, per step, the relative gap
/// (best - runner_up) / best between the two largest candidate magnitudes.
SparseApproximation omp_reference(std::span<const double> signal, const ExplicitDictionary& dict,
                                  double rho, std::vector<double>* margins = nullptr);

}  // namespace trigmp::oracle
