#include "trigmp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trigmp/errors.hpp"

namespace trigmp::oracle {

namespace {

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// Support with Fourier partners added, sorted and deduplicated.
std::vector<AtomIndex> closed_support(std::span<const AtomIndex> support, const DictionarySpec& spec) {
  std::vector<AtomIndex> out;
  for (AtomIndex index : support) {
    if (index < 1 || index > spec.atoms()) {
      throw DomainError("support index " + std::to_string(index) + " out of range");
    }
    out.push_back(index);
    if (spec.is_complex()) {
      if (const auto partner = conjugate_partner(index, spec.atoms())) out.push_back(*partner);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ExplicitDictionary::ExplicitDictionary(const DictionarySpec& spec) : spec_(spec) {
  if (spec.dim() > kMaxExplicitDim) {
    throw DomainError("explicit dictionary limited to N <= " + std::to_string(kMaxExplicitDim));
  }
  atoms_.resize(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(spec.atoms()));
  for (std::size_t n = 1; n <= spec.atoms(); ++n) {
    const Atom a = make_atom(static_cast<AtomIndex>(n), spec);
    for (std::size_t j = 0; j < spec.dim(); ++j) {
      atoms_(j, n - 1) = Complex(a.re[j], a.is_complex() ? a.im[j] : 0.0);
    }
  }
}

InnerProductVector direct_inner_products(std::span<const double> residual,
                                         const ExplicitDictionary& dict) {
  const auto& spec = dict.spec();
  if (residual.size() != spec.dim()) throw DomainError("direct_inner_products: size mismatch");
  const auto& d = dict.matrix();

  std::vector<Complex> all(spec.atoms());
  for (std::size_t n = 0; n < spec.atoms(); ++n) {
    Complex acc{};
    for (std::size_t j = 0; j < spec.dim(); ++j) acc += std::conj(d(j, n)) * residual[j];
    all[n] = acc;
  }

  InnerProductVector out;
  out.kind = spec.kind();
  switch (spec.kind()) {
    case DictionaryCase::Fourier: out.fourier = std::move(all); break;
    case DictionaryCase::Cosine:
      for (const auto& v : all) out.cosine.push_back(v.real());
      break;
    case DictionaryCase::Sine:
      for (const auto& v : all) out.sine.push_back(v.real());
      break;
    case DictionaryCase::CosineSine:
      for (std::size_t n = 0; n < all.size(); ++n) {
        (n < spec.sub_atoms() ? out.cosine : out.sine).push_back(all[n].real());
      }
      break;
  }
  return out;
}

CoefficientMap least_squares_projection(std::span<const double> signal,
                                        std::span<const AtomIndex> support,
                                        const ExplicitDictionary& dict) {
  const auto& spec = dict.spec();
  if (signal.size() != spec.dim()) throw DomainError("least_squares_projection: size mismatch");
  const auto indices = closed_support(support, spec);
  if (indices.empty()) return {};
  if (indices.size() > spec.dim()) {
    throw DegenerateSelection("support of " + std::to_string(indices.size()) +
                              " atoms cannot be independent in dimension " +
                              std::to_string(spec.dim()));
  }

  const auto rows = static_cast<Eigen::Index>(spec.dim());
  const auto cols = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXcd a(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k) a.col(k) = dict.atom(indices[k]);
  Eigen::VectorXcd f(rows);
  for (Eigen::Index j = 0; j < rows; ++j) f(j) = signal[j];

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv(cols - 1) > 0.0 ? sv(0) / sv(cols - 1) : INFINITY;
  if (cond > kMaxCondition) {
    throw DegenerateSelection("selected atoms are rank deficient (condition " +
                              std::to_string(cond) + ")");
  }

  const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(f);
  CoefficientMap out;
  for (Eigen::Index k = 0; k < cols; ++k) {
    const AtomIndex index = indices[k];
    Complex value = c(k);
    if (!spec.is_complex() || !conjugate_partner(index, spec.atoms())) value = {value.real(), 0.0};
    out[index] = value;
  }
  return out;
}

SparseApproximation omp_reference(std::span<const double> signal, const ExplicitDictionary& dict,
                                  double rho, std::vector<double>* margins) {
  const auto& spec = dict.spec();
  if (signal.size() != spec.dim()) throw DomainError("omp_reference: size mismatch");
  if (!(rho > 0.0)) throw DomainError("omp_reference: rho must be positive");
  if (margins != nullptr) margins->clear();

  SparseApproximation out;
  std::vector<AtomIndex> selected;
  std::vector<double> residual(signal.begin(), signal.end());
  double norm = norm2(residual);

  while (norm > rho) {
    const auto ip = direct_inner_products(residual, dict);
    const std::size_t range = selection_range(spec);
    std::size_t best = 0;
    double best_mag = 0.0;
    double runner_up = 0.0;
    for (std::size_t n = 1; n <= range; ++n) {
      const double mag = std::abs(ip.at(static_cast<AtomIndex>(n)));
      if (mag > best_mag) {
        runner_up = best_mag;
        best_mag = mag;
        best = n;
      } else if (mag > runner_up) {
        runner_up = mag;
      }
    }
    if (best == 0) break;
    const auto index = static_cast<AtomIndex>(best);
    if (std::find(selected.begin(), selected.end(), index) != selected.end()) {
      throw DegenerateSelection("OMP re-selected atom " + std::to_string(index));
    }
    if (margins != nullptr) margins->push_back((best_mag - runner_up) / best_mag);

    SelectionStep step;
    step.index = index;
    step.coefficient = ip.at(index);
    if (!spec.is_complex() || !conjugate_partner(index, spec.atoms())) {
      step.coefficient = {step.coefficient.real(), 0.0};
    }
    step.residual_before = norm;

    selected.push_back(index);
    out.support.push_back(index);
    if (spec.is_complex()) {
      if (const auto partner = conjugate_partner(index, spec.atoms())) out.support.push_back(*partner);
    }
    out.coefficients = least_squares_projection(signal, selected, dict);

    Eigen::VectorXcd approx = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spec.dim()));
    for (const auto& [n, c] : out.coefficients) approx += c * dict.atom(n);
    out.approximation.resize(spec.dim());
    for (std::size_t j = 0; j < spec.dim(); ++j) {
      out.approximation[j] = approx(static_cast<Eigen::Index>(j)).real();
      residual[j] = signal[j] - out.approximation[j];
    }
    norm = norm2(residual);
    step.residual_selected = norm;
    step.residual_after = norm;
    out.steps.push_back(step);
  }

  if (out.approximation.empty()) out.approximation.assign(spec.dim(), 0.0);
  out.residual = residual;
  out.residual_norm = norm;
  return out;
}

}  // namespace trigmp::oracle
