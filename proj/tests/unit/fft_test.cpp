#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "trigmp/errors.hpp"
#include "trigmp/fft.hpp"
#include "trigmp/oracles.hpp"

using namespace trigmp;
using trigmp::testing::kAllCases;
using trigmp::testing::random_signal;

namespace {

void expect_complex(Complex got, Complex want, double tol) {
  EXPECT_NEAR(got.real(), want.real(), tol);
  EXPECT_NEAR(got.imag(), want.imag(), tol);
}

const std::vector<double> kResidual{0.3, -0.1, 0.8, 0.25, -0.6, 0.05, 0.9, -0.4};

}  // namespace

TEST(PaddedDft, FrozenValues) {
  const std::vector<double> y{0.5, -1.25, 2.0, 0.75, -0.5, 1.5};
  const auto x = padded_dft(y, 16);
  ASSERT_EQ(x.size(), 16u);
  expect_complex(x[0], {3.0, 0.0}, 1e-13);
  expect_complex(x[1], {0.47235157246016946, -2.5145882200671279}, 1e-13);
  expect_complex(x[3], {-0.69965820344599261, 0.10167357608746613}, 1e-13);
  expect_complex(x[7], {3.3560755522860219, -0.68616109532093672}, 1e-13);
  expect_complex(x[8], {1.0, 0.0}, 1e-13);
  expect_complex(x[13], {-0.69965820344599194, -0.10167357608746558}, 1e-13);
}

TEST(PaddedDft, ComplexInputMatchesNaiveSum) {
  std::vector<Complex> y{{1.0, 0.5}, {-0.25, 2.0}, {0.0, -1.0}, {3.0, 0.0}, {0.5, 0.5}};
  const std::size_t m = 12;
  const auto x = padded_dft(std::span<const Complex>(y), m);
  for (std::size_t n = 0; n < m; ++n) {
    Complex acc{};
    for (std::size_t j = 0; j < y.size(); ++j) {
      acc += y[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(n * j) / double(m));
    }
    expect_complex(x[n], acc, 1e-12);
  }
}

TEST(PaddedDft, RejectsShortTransform) {
  const std::vector<double> y(10, 1.0);
  EXPECT_THROW(padded_dft(y, 8), DomainError);
}

TEST(InnerProducts, FrozenSine) {
  const auto ip = inner_products(kResidual, DictionarySpec(DictionaryCase::Sine, 16, 8));
  EXPECT_NEAR(ip.at(1).real(), 0.28977729378250816, 1e-13);
  EXPECT_NEAR(ip.at(2).real(), 0.39421073826505082, 1e-13);
  EXPECT_NEAR(ip.at(9).real(), -1.1322023063934776, 1e-13);
  EXPECT_NEAR(ip.at(16).real(), 0.5656854249492379, 1e-13);
}

TEST(InnerProducts, FrozenCosine) {
  const auto ip = inner_products(kResidual, DictionarySpec(DictionaryCase::Cosine, 16, 8));
  EXPECT_NEAR(ip.at(1).real(), 0.42426406871192851, 1e-13);
  EXPECT_NEAR(ip.at(2).real(), 0.4833171144940554, 1e-13);
  EXPECT_NEAR(ip.at(9).real(), -0.74246212024587488, 1e-13);
  EXPECT_NEAR(ip.at(16).real(), 0.51418526791850361, 1e-13);
}

TEST(InnerProducts, FrozenFourier) {
  const auto ip = inner_products(kResidual, DictionarySpec(DictionaryCase::Fourier, 16, 8));
  ASSERT_EQ(ip.size(), 16u);
  expect_complex(ip.at(1), {0.42426406871192851, 0.0}, 1e-13);
  expect_complex(ip.at(2), {0.2061180445510202, -0.24321067549148934}, 1e-13);
  expect_complex(ip.at(9), {0.56568542494923801, 0.0}, 1e-13);
  // Conjugate partner of atom 2 is atom 16.
  expect_complex(ip.at(16), std::conj(ip.at(2)), 1e-13);
}

TEST(InnerProducts, MixedIsCosineThenSine) {
  const auto ip = inner_products(kResidual, DictionarySpec(DictionaryCase::CosineSine, 32, 8));
  ASSERT_EQ(ip.cosine.size(), 16u);
  ASSERT_EQ(ip.sine.size(), 16u);
  EXPECT_NEAR(ip.at(2).real(), 0.4833171144940554, 1e-13);
  EXPECT_NEAR(ip.at(16 + 9).real(), -1.1322023063934776, 1e-13);
  EXPECT_THROW(ip.at(33), DomainError);
  EXPECT_THROW(ip.at(0), DomainError);
}

TEST(InnerProducts, MatchDirectOracleAcrossShapes) {
  std::uint64_t seed = 11;
  for (auto kind : kAllCases) {
    for (std::size_t dim : {1u, 2u, 7u, 16u, 45u}) {
      for (std::size_t atoms : {dim, dim + 1, 2 * dim, 3 * dim + 5}) {
        if (kind == DictionaryCase::CosineSine && atoms % 2 != 0) continue;
        const DictionarySpec spec(kind, atoms, dim);
        const oracle::ExplicitDictionary dict(spec);
        const auto r = random_signal(dim, seed++);
        const auto fast = inner_products(r, spec);
        const auto slow = oracle::direct_inner_products(r, dict);
        double scale = 0.0;
        for (AtomIndex n = 1; n <= atoms; ++n) scale = std::max(scale, std::abs(slow.at(n)));
        for (AtomIndex n = 1; n <= atoms; ++n) {
          ASSERT_LE(std::abs(fast.at(n) - slow.at(n)), 1e-12 * std::max(scale, 1.0))
              << to_string(kind) << " N=" << dim << " M=" << atoms << " n=" << n;
        }
      }
    }
  }
}

TEST(InnerProducts, EngineIsReusableAndLinear) {
  const DictionarySpec spec(DictionaryCase::CosineSine, 128, 32);
  InnerProductEngine engine(spec);
  const auto a = random_signal(32, 1);
  const auto b = random_signal(32, 2);
  std::vector<double> sum(32);
  for (std::size_t j = 0; j < 32; ++j) sum[j] = 2.0 * a[j] - b[j];
  const auto ia = engine.compute(a);
  const auto ib = engine.compute(b);
  InnerProductVector is;
  engine.compute(sum, is);
  for (AtomIndex n = 1; n <= 128; ++n) {
    ASSERT_NEAR(is.at(n).real(), 2.0 * ia.at(n).real() - ib.at(n).real(), 1e-12);
  }
  // Moved-from engines hand over their plan.
  InnerProductEngine moved(std::move(engine));
  const auto again = moved.compute(a);
  for (AtomIndex n = 1; n <= 128; ++n) ASSERT_EQ(again.at(n), ia.at(n));
}

TEST(InnerProducts, RejectsWrongLength) {
  const DictionarySpec spec(DictionaryCase::Cosine, 32, 16);
  const std::vector<double> r(15, 0.0);
  EXPECT_THROW(inner_products(r, spec), DomainError);
}
