#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "trigmp/errors.hpp"
#include "trigmp/oracles.hpp"
#include "trigmp/pursuit.hpp"
#include "trigmp/synth.hpp"

using namespace trigmp;
using trigmp::testing::kAllCases;
using trigmp::testing::norm2;
using trigmp::testing::random_signal;

namespace {

DictionarySpec spec_for(DictionaryCase kind, std::size_t dim = 32, std::size_t r = 4) {
  return DictionarySpec(kind, r * dim, dim);
}

double max_support_product(std::span<const double> residual, const SparseApproximation& a,
                           const oracle::ExplicitDictionary& dict) {
  const auto ip = oracle::direct_inner_products(residual, dict);
  double worst = 0.0;
  for (AtomIndex n : a.support) worst = std::max(worst, std::abs(ip.at(n)));
  return worst;
}

}  // namespace

TEST(Select, AgreesWithOracleArgmax) {
  for (auto kind : kAllCases) {
    const auto spec = spec_for(kind);
    const oracle::ExplicitDictionary dict(spec);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = random_signal(32, seed);
      const auto chosen = select_atom(r, spec);
      ASSERT_TRUE(chosen);
      const auto ip = oracle::direct_inner_products(r, dict);
      double best = 0.0;
      for (AtomIndex n = 1; n <= selection_range(spec); ++n) best = std::max(best, std::abs(ip.at(n)));
      EXPECT_LE(chosen->index, selection_range(spec));
      EXPECT_NEAR(std::abs(chosen->coefficient), best, 1e-12);
      EXPECT_NEAR(std::abs(ip.at(chosen->index)), best, 1e-12);
    }
  }
}

TEST(Select, ZeroResidualSelectsNothing) {
  const std::vector<double> zero(16, 0.0);
  EXPECT_FALSE(select_atom(zero, DictionarySpec(DictionaryCase::CosineSine, 64, 16)));
}

TEST(Select, SelfConjugateCoefficientIsReal) {
  // A constant signal is captured by the DC atom, which is its own conjugate.
  const std::vector<double> dc(16, 0.5);
  const auto chosen = select_atom(dc, DictionarySpec(DictionaryCase::Fourier, 64, 16));
  ASSERT_TRUE(chosen);
  EXPECT_EQ(chosen->index, 1u);
  EXPECT_EQ(chosen->coefficient.imag(), 0.0);
  EXPECT_NEAR(chosen->coefficient.real(), 2.0, 1e-14);
}

TEST(Reselect, FoldsPartnersOntoCanonicalIndex) {
  const DictionarySpec spec(DictionaryCase::Fourier, 16, 8);
  const auto r = random_signal(8, 3);
  const std::vector<AtomIndex> partner_only{16};
  const auto s = reselect_atom(r, spec, partner_only);
  EXPECT_EQ(s.index, 2u);
  const auto ip = inner_products(r, spec);
  EXPECT_NEAR(std::abs(s.coefficient - ip.at(2)), 0.0, 1e-13);
  EXPECT_THROW(reselect_atom(r, spec, std::vector<AtomIndex>{}), DomainError);
  EXPECT_THROW(reselect_atom(r, spec, std::vector<AtomIndex>{17}), DomainError);
}

TEST(Reselect, DirectAndFftPathsAgree) {
  const auto spec = spec_for(DictionaryCase::CosineSine, 64);
  const auto r = random_signal(64, 5);
  const std::vector<AtomIndex> support{3, 40, 77, 200, 256};
  PursuitOptions direct;
  direct.direct_threshold = 1e9;
  PursuitOptions fft;
  fft.direct_reselection = false;
  const auto a = Pursuit(spec, direct).reselect(r, support);
  const auto b = Pursuit(spec, fft).reselect(r, support);
  EXPECT_EQ(a.index, b.index);
  EXPECT_NEAR(a.coefficient.real(), b.coefficient.real(), 1e-12);
}

TEST(Mp, EnergyIdentityOnRealDictionaries) {
  for (auto kind : {DictionaryCase::Cosine, DictionaryCase::Sine, DictionaryCase::CosineSine}) {
    const auto spec = spec_for(kind);
    const auto f = random_signal(32, 7);
    const auto a = mp(f, spec, 0.3 * norm2(f));
    ASSERT_FALSE(a.steps.empty());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
      const auto& s = a.steps[k];
      const double lhs = s.residual_before * s.residual_before;
      const double rhs = std::norm(s.coefficient) + s.residual_after * s.residual_after;
      EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
      EXPECT_EQ(s.projection_iterations, 0u);
      if (k > 0) {
        EXPECT_DOUBLE_EQ(s.residual_before, a.steps[k - 1].residual_after);
      }
    }
  }
}

TEST(Mp, ReachesTolerance) {
  for (auto kind : kAllCases) {
    const auto spec = spec_for(kind);
    const auto f = random_signal(32, 8);
    const double rho = 0.05 * norm2(f);
    const auto a = mp(f, spec, rho);
    EXPECT_LE(a.residual_norm, rho * (1 + 1e-9)) << to_string(kind);
    for (std::size_t j = 0; j < f.size(); ++j) {
      EXPECT_NEAR(a.approximation[j] + a.residual[j], f[j], 1e-12);
    }
  }
}

TEST(Spmp, ResidualOrthogonalToSupport) {
  for (auto kind : kAllCases) {
    const auto spec = spec_for(kind);
    const oracle::ExplicitDictionary dict(spec);
    const auto f = random_signal(32, 9);
    const double rho = 0.1 * norm2(f);
    PursuitOptions options;
    options.epsilon = 1e-10;
    const auto a = spmp(f, spec, rho, options);
    EXPECT_LE(a.residual_norm, rho * (1 + 1e-9));
    EXPECT_LE(max_support_product(a.residual, a, dict), 1e-9) << to_string(kind);
    for (const auto& s : a.steps) EXPECT_GE(s.projection_iterations, 1u);
  }
}

TEST(Spmp, FourierCoefficientsComeInConjugatePairs) {
  const auto spec = spec_for(DictionaryCase::Fourier);
  const auto f = random_signal(32, 10);
  const auto a = spmp(f, spec, 0.1 * norm2(f));
  for (const auto& [n, c] : a.coefficients) {
    const auto p = conjugate_partner(n, spec.atoms());
    if (p) {
      ASSERT_TRUE(a.coefficients.count(*p));
      EXPECT_EQ(a.coefficients.at(*p), std::conj(c));
    } else {
      EXPECT_EQ(c.imag(), 0.0);
    }
  }
  EXPECT_EQ(a.support.size(), a.coefficients.size());
}

TEST(Spmp, RecoversExactSparseSignals) {
  // Random supports in the cosine-only or sine-only frames are often too
  // coherent for greedy recovery; the mixed and complex frames are not.
  for (auto kind : {DictionaryCase::CosineSine, DictionaryCase::Fourier}) {
    const auto spec = spec_for(kind, 256, 2);
    const auto f = synth::sparse_combination(spec, 1, 5, 42);
    const auto a = spmp(f, spec, 1e-8 * norm2(f));
    EXPECT_EQ(a.steps.size(), 5u) << to_string(kind);
  }
}

TEST(Project, ConvergesToOrthogonality) {
  const auto spec = spec_for(DictionaryCase::CosineSine, 64);
  const oracle::ExplicitDictionary dict(spec);
  auto r = random_signal(64, 12);
  const std::vector<AtomIndex> support{5, 6, 7, 130, 131, 250};
  CoefficientMap c;
  const auto iterations = project_mp(r, c, support, spec, 1e-9);
  EXPECT_GT(iterations, 0u);
  const auto ip = oracle::direct_inner_products(r, dict);
  for (AtomIndex n : support) EXPECT_LE(std::abs(ip.at(n)), 1e-8);
}

TEST(Project, AbortsAtIterationCap) {
  const auto spec = spec_for(DictionaryCase::Cosine);
  auto r = random_signal(32, 13);
  PursuitOptions options;
  options.projection_cap_per_atom = 1;
  CoefficientMap c;
  const std::vector<AtomIndex> support{1, 2, 3, 4};
  EXPECT_THROW(project_mp(r, c, support, spec, 1e-300, options), PursuitAborted);
  EXPECT_THROW(project_mp(r, c, support, spec, 0.0, options), DomainError);
}

TEST(Pursuit, StagnationGuardAborts) {
  const auto spec = spec_for(DictionaryCase::Cosine);
  const auto f = random_signal(32, 14);
  PursuitOptions options;
  options.stagnation_window = 1;
  options.stagnation_tolerance = 1.0;
  EXPECT_THROW(mp(f, spec, 1e-6, options), PursuitAborted);
}

TEST(Pursuit, RejectsBadArguments) {
  const auto spec = spec_for(DictionaryCase::Cosine);
  const auto f = random_signal(32, 15);
  EXPECT_THROW(spmp(f, spec, 0.0), DomainError);
  EXPECT_THROW(spmp(random_signal(31, 1), spec, 1.0), DomainError);
}

TEST(Pursuit, SignalBelowToleranceNeedsNoTerms) {
  const auto spec = spec_for(DictionaryCase::Sine);
  const auto f = random_signal(32, 16);
  const auto a = spmp(f, spec, 2.0 * norm2(f));
  EXPECT_TRUE(a.steps.empty());
  EXPECT_TRUE(a.coefficients.empty());
  EXPECT_DOUBLE_EQ(a.residual_norm, norm2(f));
}

TEST(Synthesize, RejectsUnpairedFourierTerms) {
  const DictionarySpec spec(DictionaryCase::Fourier, 32, 16);
  CoefficientMap c{{3, Complex(1.0, 0.5)}};
  EXPECT_THROW(synthesize(c, spec), DomainError);
  c[31] = Complex(1.0, -0.5);
  const auto y = synthesize(c, spec);
  const auto a = make_atom(3, spec);
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_NEAR(y[j], 2.0 * (a.re[j] - 0.5 * a.im[j]), 1e-14);
  }
}
