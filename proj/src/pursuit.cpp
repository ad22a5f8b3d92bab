#include "trigmp/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trigmp/errors.hpp"

namespace trigmp {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

bool self_conjugate(AtomIndex index, const DictionarySpec& spec) {
  return spec.is_complex() && !conjugate_partner(index, spec.atoms());
}

}  // namespace

std::vector<AtomIndex> SparseApproximation::selection_order() const {
  std::vector<AtomIndex> order;
  order.reserve(steps.size());
  for (const auto& s : steps) order.push_back(s.index);
  return order;
}

std::vector<std::size_t> SparseApproximation::projection_iterations() const {
  std::vector<std::size_t> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.projection_iterations);
  return out;
}

Pursuit::Pursuit(const DictionarySpec& spec, PursuitOptions options)
    : spec_(spec), options_(options), engine_(spec) {
  direct_threshold_ = options_.direct_threshold > 0.0
                          ? options_.direct_threshold
                          : spec.redundancy() * std::log2(static_cast<double>(spec.atoms()));
}

const Atom& Pursuit::atom(AtomIndex index) {
  auto it = cache_.find(index);
  if (it == cache_.end()) it = cache_.emplace(index, make_atom(index, spec_)).first;
  return it->second;
}

void Pursuit::clear_cache() {
  cache_.clear();
  slots_.clear();
  slot_atoms_.clear();
  gram_.clear();
  conj_gram_.clear();
}

std::size_t Pursuit::gram_slot(AtomIndex index) {
  if (const auto it = slots_.find(index); it != slots_.end()) return it->second;
  const std::size_t slot = slot_atoms_.size();
  const Atom& a = atom(index);
  const bool complex = spec_.is_complex();
  gram_.emplace_back(slot + 1);
  if (complex) conj_gram_.emplace_back(slot + 1);
  for (std::size_t t = 0; t <= slot; ++t) {
    const Atom& b = t == slot ? a : atom(slot_atoms_[t]);
    double rr = 0.0;
    for (std::size_t j = 0; j < a.re.size(); ++j) rr += b.re[j] * a.re[j];
    if (!complex) {
      gram_[slot][t] = rr;
      if (t < slot) gram_[t].push_back(rr);
      continue;
    }
    double ii = 0.0;
    double ri = 0.0;
    double ir = 0.0;
    for (std::size_t j = 0; j < a.re.size(); ++j) {
      ii += b.im[j] * a.im[j];
      ri += b.re[j] * a.im[j];
      ir += b.im[j] * a.re[j];
    }
    // <d_b, d_a> = sum conj(d_b) d_a and <d_b, conj(d_a)>; the first is
    // Hermitian, the second symmetric.
    const Complex g(rr + ii, ri - ir);
    const Complex h(rr - ii, -ri - ir);
    gram_[slot][t] = std::conj(g);
    conj_gram_[slot][t] = h;
    if (t < slot) {
      gram_[t].push_back(g);
      conj_gram_[t].push_back(h);
    }
  }
  slots_.emplace(index, slot);
  slot_atoms_.push_back(index);
  return slot;
}

Selection Pursuit::finalize(AtomIndex index, Complex value) const {
  if (!spec_.is_complex() || self_conjugate(index, spec_)) value = {value.real(), 0.0};
  return {index, value};
}

std::optional<Selection> Pursuit::select(std::span<const double> residual) {
  engine_.compute(residual, products_);

  // Candidates in increasing index order; strict '>' keeps the lowest index
  // on ties.
  std::size_t best = 0;
  double best_mag = 0.0;
  Complex best_val;
  auto scan = [&](auto const& values, std::size_t count, std::size_t offset) {
    for (std::size_t k = 0; k < count; ++k) {
      const double mag = std::abs(values[k]);
      if (mag > best_mag) {
        best_mag = mag;
        best = offset + k + 1;
        best_val = values[k];
      }
    }
  };
  switch (spec_.kind()) {
    case DictionaryCase::Fourier: scan(products_.fourier, selection_range(spec_), 0); break;
    case DictionaryCase::Cosine: scan(products_.cosine, products_.cosine.size(), 0); break;
    case DictionaryCase::Sine: scan(products_.sine, products_.sine.size(), 0); break;
    case DictionaryCase::CosineSine:
      scan(products_.cosine, products_.cosine.size(), 0);
      scan(products_.sine, products_.sine.size(), products_.cosine.size());
      break;
  }
  if (best == 0) return std::nullopt;
  return finalize(static_cast<AtomIndex>(best), best_val);
}

std::vector<AtomIndex> Pursuit::canonical_support(std::span<const AtomIndex> support) const {
  std::vector<AtomIndex> out;
  out.reserve(support.size());
  for (AtomIndex index : support) {
    if (index < 1 || index > spec_.atoms()) {
      throw DomainError("support index " + std::to_string(index) + " out of range");
    }
    out.push_back(canonical_index(index, spec_));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Complex Pursuit::direct_inner_product(AtomIndex index, std::span<const double> residual) {
  const Atom& a = atom(index);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < residual.size(); ++j) re += a.re[j] * residual[j];
  if (a.is_complex()) {
    for (std::size_t j = 0; j < residual.size(); ++j) im -= a.im[j] * residual[j];
  }
  return {re, im};
}

Selection Pursuit::reselect(std::span<const double> residual, std::span<const AtomIndex> support) {
  if (support.empty()) throw DomainError("reselect: empty support");
  if (residual.size() != spec_.dim()) throw DomainError("reselect: residual length mismatch");
  const auto candidates = canonical_support(support);

  const bool direct = options_.direct_reselection &&
                      static_cast<double>(candidates.size()) <= direct_threshold_;
  if (!direct) engine_.compute(residual, products_);

  AtomIndex best = candidates.front();
  double best_mag = -1.0;
  Complex best_val;
  for (AtomIndex index : candidates) {
    const Complex value = direct ? direct_inner_product(index, residual) : products_.at(index);
    const double mag = std::abs(value);
    if (mag > best_mag) {
      best_mag = mag;
      best = index;
      best_val = value;
    }
  }
  return finalize(best, best_val);
}

void Pursuit::subtract(std::span<double> residual, const Selection& term) {
  const Atom& a = atom(term.index);
  const double cr = term.coefficient.real();
  if (!a.is_complex() || self_conjugate(term.index, spec_)) {
    for (std::size_t j = 0; j < residual.size(); ++j) residual[j] -= cr * a.re[j];
    return;
  }
  // c d_l + c* d_l' = 2 Re(c d_l)
  const double ci = term.coefficient.imag();
  for (std::size_t j = 0; j < residual.size(); ++j) {
    residual[j] -= 2.0 * (cr * a.re[j] - ci * a.im[j]);
  }
}

void Pursuit::accumulate(CoefficientMap& coefficients, const Selection& term) const {
  Complex& c = coefficients[term.index];
  c += term.coefficient;
  if (spec_.is_complex()) {
    if (const auto partner = conjugate_partner(term.index, spec_.atoms())) {
      coefficients[*partner] = std::conj(c);
    } else {
      c = {c.real(), 0.0};
    }
  }
}

std::size_t Pursuit::project(std::span<double> residual, CoefficientMap& coefficients,
                             std::span<const AtomIndex> support, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("project: epsilon must be positive");
  if (residual.size() != spec_.dim()) throw DomainError("project: residual length mismatch");
  const auto candidates = canonical_support(support);
  if (candidates.empty()) throw DomainError("project: empty support");
  const std::size_t cap = options_.projection_cap_per_atom * candidates.size();
  if (candidates.size() > options_.gram_limit) {
    return project_recomputed(residual, coefficients, candidates, epsilon, cap);
  }

  const std::size_t count = candidates.size();
  std::vector<std::size_t> slot(count);
  std::vector<bool> paired(count);
  for (std::size_t i = 0; i < count; ++i) {
    slot[i] = gram_slot(candidates[i]);
    paired[i] = spec_.is_complex() && !self_conjugate(candidates[i], spec_);
  }

  // <d_n, R> for the support, then kept current through the Gram matrix:
  // removing c d_k (or c d_k + conj(c d_k) for a pair) from R lowers
  // <d_n, R> by c <d_n, d_k> (+ conj(c) <d_n, conj(d_k)>).
  std::vector<Complex> products(count);
  const bool direct = options_.direct_reselection &&
                      static_cast<double>(count) <= direct_threshold_;
  if (!direct) engine_.compute(std::span<const double>(residual), products_);
  for (std::size_t i = 0; i < count; ++i) {
    products[i] = direct ? direct_inner_product(candidates[i], residual) : products_.at(candidates[i]);
  }
  std::vector<Complex> moved(count);

  std::size_t iterations = 0;
  double mu = 2.0 * epsilon;
  while (mu > epsilon) {
    if (iterations >= cap) {
      throw PursuitAborted("projection did not reach epsilon=" + std::to_string(epsilon) +
                           " within " + std::to_string(cap) + " iterations over " +
                           std::to_string(count) + " atoms (last |c|=" + std::to_string(mu) +
                           "); selected atoms are numerically degenerate");
    }
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double mag = std::abs(products[i]);
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    const Selection term = finalize(candidates[best], products[best]);
    const Complex c = term.coefficient;
    const std::size_t k = slot[best];
    for (std::size_t i = 0; i < count; ++i) {
      Complex delta = c * gram_[slot[i]][k];
      if (paired[best]) delta += std::conj(c) * conj_gram_[slot[i]][k];
      products[i] -= delta;
    }
    moved[best] += c;
    mu = std::abs(c);
    accumulate(coefficients, term);
    ++iterations;
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (moved[i] != Complex{}) subtract(residual, {candidates[i], moved[i]});
  }
  return iterations;
}

std::size_t Pursuit::project_recomputed(std::span<double> residual, CoefficientMap& coefficients,
                                        std::span<const AtomIndex> candidates, double epsilon,
                                        std::size_t cap) {
  std::size_t iterations = 0;
  double mu = 2.0 * epsilon;
  while (mu > epsilon) {
    if (iterations >= cap) {
      throw PursuitAborted("projection did not reach epsilon=" + std::to_string(epsilon) +
                           " within " + std::to_string(cap) + " iterations over " +
                           std::to_string(candidates.size()) + " atoms (last |c|=" +
                           std::to_string(mu) + "); selected atoms are numerically degenerate");
    }
    const Selection term = reselect(std::span<const double>(residual), candidates);
    subtract(residual, term);
    mu = std::abs(term.coefficient);
    accumulate(coefficients, term);
    ++iterations;
  }
  return iterations;
}

SparseApproximation Pursuit::run(std::span<const double> signal, double rho, bool self_project) {
  if (signal.size() != spec_.dim()) {
    throw DomainError("pursuit: signal length " + std::to_string(signal.size()) +
                      " != atom length " + std::to_string(spec_.dim()));
  }
  if (!(rho > 0.0)) throw DomainError("pursuit: rho must be positive");
  const double epsilon = options_.epsilon > 0.0 ? options_.epsilon : options_.epsilon_factor * rho;
  clear_cache();

  SparseApproximation out;
  std::vector<double> residual(signal.begin(), signal.end());
  std::vector<AtomIndex> candidates;  // sorted canonical support
  std::vector<double> history;
  double norm = norm2(residual);
  history.push_back(norm);

  // mu = 2 rho on entry is the same as testing ||R|| > rho before each pass.
  while (norm > rho) {
    const auto chosen = select(residual);
    if (!chosen) break;

    SelectionStep step;
    step.index = chosen->index;
    step.coefficient = chosen->coefficient;
    step.residual_before = norm;

    const auto pos = std::lower_bound(candidates.begin(), candidates.end(), chosen->index);
    if (pos == candidates.end() || *pos != chosen->index) {
      candidates.insert(pos, chosen->index);
      out.support.push_back(chosen->index);
      if (spec_.is_complex()) {
        if (const auto partner = conjugate_partner(chosen->index, spec_.atoms())) {
          out.support.push_back(*partner);
        }
      }
    }
    accumulate(out.coefficients, *chosen);
    subtract(residual, *chosen);
    step.residual_selected = norm2(residual);

    if (self_project) {
      step.projection_iterations = project(residual, out.coefficients, candidates, epsilon);
    }
    norm = norm2(residual);
    step.residual_after = norm;
    out.steps.push_back(step);
    history.push_back(norm);

    const std::size_t window = options_.stagnation_window;
    if (window > 0 && history.size() > window) {
      const double old = history[history.size() - 1 - window];
      if (old - norm <= options_.stagnation_tolerance * old) {
        throw PursuitAborted("residual stagnated at " + std::to_string(norm) + " above rho=" +
                             std::to_string(rho) + " after " + std::to_string(out.steps.size()) +
                             " selections");
      }
    }
  }

  out.approximation = synthesize(out.coefficients, spec_);
  out.residual.resize(signal.size());
  for (std::size_t j = 0; j < signal.size(); ++j) out.residual[j] = signal[j] - out.approximation[j];
  out.residual_norm = norm2(out.residual);
  return out;
}

SparseApproximation Pursuit::spmp(std::span<const double> signal, double rho) {
  return run(signal, rho, true);
}

SparseApproximation Pursuit::mp(std::span<const double> signal, double rho) {
  return run(signal, rho, false);
}

std::optional<Selection> select_atom(std::span<const double> residual, const DictionarySpec& spec) {
  return Pursuit(spec).select(residual);
}

Selection reselect_atom(std::span<const double> residual, const DictionarySpec& spec,
                        std::span<const AtomIndex> support) {
  return Pursuit(spec).reselect(residual, support);
}

std::size_t project_mp(std::span<double> residual, CoefficientMap& coefficients,
                       std::span<const AtomIndex> support, const DictionarySpec& spec,
                       double epsilon, const PursuitOptions& options) {
  return Pursuit(spec, options).project(residual, coefficients, support, epsilon);
}

SparseApproximation spmp(std::span<const double> signal, const DictionarySpec& spec, double rho,
                         const PursuitOptions& options) {
  return Pursuit(spec, options).spmp(signal, rho);
}

SparseApproximation mp(std::span<const double> signal, const DictionarySpec& spec, double rho,
                       const PursuitOptions& options) {
  return Pursuit(spec, options).mp(signal, rho);
}

std::vector<double> synthesize(const CoefficientMap& coefficients, const DictionarySpec& spec) {
  std::vector<double> re(spec.dim(), 0.0);
  std::vector<double> im(spec.is_complex() ? spec.dim() : 0, 0.0);
  for (const auto& [index, c] : coefficients) {
    const Atom a = make_atom(index, spec);
    for (std::size_t j = 0; j < re.size(); ++j) re[j] += c.real() * a.re[j];
    if (a.is_complex()) {
      for (std::size_t j = 0; j < re.size(); ++j) {
        re[j] -= c.imag() * a.im[j];
        im[j] += c.real() * a.im[j] + c.imag() * a.re[j];
      }
    }
  }
  if (!im.empty()) {
    double re_norm = 0.0;
    double im_norm = 0.0;
    for (std::size_t j = 0; j < re.size(); ++j) {
      re_norm += re[j] * re[j];
      im_norm += im[j] * im[j];
    }
    if (std::sqrt(im_norm) > 1e-10 * std::max(std::sqrt(re_norm), 1e-300)) {
      throw DomainError("synthesize: Fourier coefficients are not conjugate-paired");
    }
  }
  return re;
}

}  // namespace trigmp
