#include "trigmp/dictionary.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "trigmp/errors.hpp"

namespace trigmp {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(2*pi*k/period) with k reduced exactly in integers first.
double sin_turns(std::uint64_t k, std::uint64_t period) {
  return std::sin(2.0 * kPi * static_cast<double>(k % period) / static_cast<double>(period));
}

// sum_j f(j)^2 for an unnormalized atom, by direct summation.
template <typename F>
double direct_norm(std::size_t dim, F&& sample) {
  double acc = 0.0;
  for (std::size_t j = 1; j <= dim; ++j) {
    const double v = sample(j);
    acc += v * v;
  }
  return std::sqrt(acc);
}

void check_index(std::size_t n, std::size_t atoms, const char* what) {
  if (n < 1 || n > atoms) {
    throw DomainError(std::string(what) + ": index " + std::to_string(n) + " outside [1, " +
                      std::to_string(atoms) + "]");
  }
}

}  // namespace

std::string_view to_string(DictionaryCase kind) {
  switch (kind) {
    case DictionaryCase::Fourier: return "dft";
    case DictionaryCase::Cosine: return "dct";
    case DictionaryCase::Sine: return "dst";
    case DictionaryCase::CosineSine: return "mixed";
  }
  return "?";
}

DictionaryCase parse_case(std::string_view name) {
  if (name == "dft" || name == "I") return DictionaryCase::Fourier;
  if (name == "dct" || name == "II") return DictionaryCase::Cosine;
  if (name == "dst" || name == "III") return DictionaryCase::Sine;
  if (name == "mixed" || name == "IV") return DictionaryCase::CosineSine;
  throw DomainError("unknown dictionary case '" + std::string(name) + "'");
}

DictionarySpec::DictionarySpec(DictionaryCase kind, std::size_t atoms, std::size_t dim)
    : kind_(kind), atoms_(atoms), dim_(dim) {
  if (dim_ < 1) throw DomainError("dictionary atom length must be positive");
  if (atoms_ < dim_) {
    throw DomainError("dictionary needs M >= N (M=" + std::to_string(atoms_) +
                      ", N=" + std::to_string(dim_) + ")");
  }
  if (kind_ == DictionaryCase::CosineSine && atoms_ % 2 != 0) {
    throw DomainError("mixed cosine-sine dictionary needs an even M");
  }
  if (atoms_ > (std::size_t{1} << 30)) throw DomainError("dictionary too large");
}

double Atom::norm() const {
  double acc = 0.0;
  for (double v : re) acc += v * v;
  for (double v : im) acc += v * v;
  return std::sqrt(acc);
}

double weight_cos(std::size_t n, std::size_t atoms, std::size_t dim) {
  check_index(n, atoms, "weight_cos");
  if (n == 1) return std::sqrt(static_cast<double>(dim));
  const double theta = kPi * static_cast<double>(n - 1) / static_cast<double>(atoms);
  // sin(theta) sin(2N theta) / (2(1 - cos 2 theta)) == sin(2N theta) / (4 sin theta)
  const double s2n = sin_turns(static_cast<std::uint64_t>(n - 1) * dim, atoms);
  return std::sqrt(0.5 * static_cast<double>(dim) + s2n / (4.0 * std::sin(theta)));
}

double weight_sin(std::size_t n, std::size_t atoms, std::size_t dim) {
  check_index(n, atoms, "weight_sin");
  if (n == atoms) {
    return direct_norm(dim, [&](std::size_t j) {
      return std::sin(kPi * static_cast<double>(2 * j - 1) / 2.0);
    });
  }
  const double theta = kPi * static_cast<double>(n) / static_cast<double>(atoms);
  const double s2n = sin_turns(static_cast<std::uint64_t>(n) * dim, atoms);
  return std::sqrt(0.5 * static_cast<double>(dim) - s2n / (4.0 * std::sin(theta)));
}

namespace {

// cos/sin(pi (2j-1) k / (2M)) with the phase reduced modulo 4M.
void fill_cosine(std::vector<double>& out, std::size_t k, std::size_t sub, double scale) {
  const std::uint64_t period = 4 * static_cast<std::uint64_t>(sub);
  for (std::size_t j = 1; j <= out.size(); ++j) {
    const std::uint64_t r = (static_cast<std::uint64_t>(2 * j - 1) * k) % period;
    out[j - 1] = scale * std::cos(kPi * static_cast<double>(r) / (2.0 * static_cast<double>(sub)));
  }
}

void fill_sine(std::vector<double>& out, std::size_t k, std::size_t sub, double scale) {
  const std::uint64_t period = 4 * static_cast<std::uint64_t>(sub);
  for (std::size_t j = 1; j <= out.size(); ++j) {
    const std::uint64_t r = (static_cast<std::uint64_t>(2 * j - 1) * k) % period;
    out[j - 1] = scale * std::sin(kPi * static_cast<double>(r) / (2.0 * static_cast<double>(sub)));
  }
}

}  // namespace

Atom make_atom(AtomIndex index, const DictionarySpec& spec) {
  check_index(index, spec.atoms(), "make_atom");
  const std::size_t dim = spec.dim();
  Atom atom;
  atom.index = index;
  atom.re.resize(dim);

  switch (spec.kind()) {
    case DictionaryCase::Fourier: {
      atom.im.resize(dim);
      const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
      const std::uint64_t period = spec.atoms();
      for (std::size_t j = 1; j <= dim; ++j) {
        const std::uint64_t r = (static_cast<std::uint64_t>(j - 1) * (index - 1)) % period;
        const double phase = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(period);
        atom.re[j - 1] = scale * std::cos(phase);
        atom.im[j - 1] = scale * std::sin(phase);
      }
      break;
    }
    case DictionaryCase::Cosine:
      fill_cosine(atom.re, index - 1, spec.atoms(), 1.0 / weight_cos(index, spec.atoms(), dim));
      break;
    case DictionaryCase::Sine:
      fill_sine(atom.re, index, spec.atoms(), 1.0 / weight_sin(index, spec.atoms(), dim));
      break;
    case DictionaryCase::CosineSine: {
      const std::size_t sub = spec.sub_atoms();
      if (index <= sub) {
        fill_cosine(atom.re, index - 1, sub, 1.0 / weight_cos(index, sub, dim));
      } else {
        const std::size_t k = index - sub;
        fill_sine(atom.re, k, sub, 1.0 / weight_sin(k, sub, dim));
      }
      break;
    }
  }
  return atom;
}

std::optional<AtomIndex> conjugate_partner(AtomIndex index, std::size_t atoms) {
  if (index < 1 || index > atoms) return std::nullopt;
  const std::size_t partner = atoms - index + 2;
  if (partner > atoms || partner == index) return std::nullopt;
  return static_cast<AtomIndex>(partner);
}

AtomIndex canonical_index(AtomIndex index, const DictionarySpec& spec) {
  if (!spec.is_complex()) return index;
  const auto partner = conjugate_partner(index, spec.atoms());
  return partner && *partner < index ? *partner : index;
}

std::size_t selection_range(const DictionarySpec& spec) {
  return spec.is_complex() ? spec.atoms() / 2 + 1 : spec.atoms();
}

}  // namespace trigmp
