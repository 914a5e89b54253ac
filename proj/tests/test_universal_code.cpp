#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "adabatt/battery.hpp"
#include "adabatt/generators.hpp"
#include "adabatt/serial_ref.hpp"
#include "adabatt/universal_code.hpp"

using namespace adabatt;

TEST_CASE("codelength worked values") {
  CHECK(code_length(BitSequence(), 0) == 0.0);
  CHECK(code_length(BitSequence(), 3) == 0.0);

  // P("00") = (1/2)(3/4) = 3/8
  CHECK(code_length(BitSequence::from_string("00"), 0) ==
        doctest::Approx(std::log2(8.0 / 3.0)).epsilon(1e-12));

  // P(0^8) = prod_{j<8} (j + 1/2)/(j + 1) = 2027025/10321920
  const double l8 = code_length(BitSequence::from_string("00000000"), 0);
  CHECK(l8 == doctest::Approx(-std::log2(2027025.0 / 10321920.0)).epsilon(1e-12));
  CHECK(std::fabs(l8 - 2.3482) < 1e-4);

  // first min(k, n) symbols cost one bit each
  CHECK(code_length(BitSequence::from_string("1"), 2) == 1.0);
  CHECK(code_length(BitSequence::from_string("10"), 2) == 2.0);
}

TEST_CASE("tau and the compression p-value") {
  CHECK(tau_phi(BitSequence(), 0) == 0.0);
  CHECK(compression_pvalue(BitSequence(), 0) == 1.0);

  const BitSequence z8 = BitSequence::from_string("00000000");
  const double tau = tau_phi(z8, 0);
  CHECK(tau == doctest::Approx(8.0 - 2.34828).epsilon(1e-4));
  CHECK(compression_pvalue(z8, 0) == doctest::Approx(0.0199).epsilon(2e-3));
}

TEST_CASE("closed form matches the sequential estimator") {
  std::mt19937_64 eng(41);
  for (int rep = 0; rep < 60; ++rep) {
    const std::uint64_t n = eng() % 2000;
    BitWriter w;
    const double bias = 0.1 + 0.8 * static_cast<double>(eng() % 100) / 100.0;
    for (std::uint64_t i = 0; i < n; ++i)
      w.push_bit((static_cast<double>(eng() >> 11) * 0x1.0p-53) < bias);
    const BitSequence x = std::move(w).take();
    for (int k : {0, 1, 2, 3}) {
      const double a = code_length(x, k);
      const double b = serial_ref::code_length(x, k);
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
}

TEST_CASE("rejection rule is the codelength threshold") {
  std::mt19937_64 eng(43);
  for (int rep = 0; rep < 100; ++rep) {
    const std::uint64_t n = 16 + eng() % 200;
    BitWriter w;
    for (std::uint64_t i = 0; i < n; ++i) w.push_bit(eng() % 3 == 0);
    const BitSequence x = std::move(w).take();
    const double alpha = 0.5 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) + 1e-6;
    const double l = code_length(x, 1);
    const bool reject_by_pvalue = compression_pvalue(x, 1) <= alpha;
    const bool reject_by_length = l <= static_cast<double>(n) + std::log2(alpha);
    CHECK(reject_by_pvalue == reject_by_length);
  }
}

TEST_CASE("kraft equality holds exactly for every length") {
  for (int k : {0, 1, 2}) {
    for (int m = 1; m <= 12; ++m) {
      long double sum = 0.0L;
      for (std::uint64_t w = 0; w < (1ull << m); ++w)
        sum += exp2l(-static_cast<long double>(
            code_length(BitSequence::from_word_bits(w, m), k)));
      CHECK(std::fabs(static_cast<double>(sum - 1.0L)) < 1e-9);
    }
  }
}

TEST_CASE("type I level holds empirically" * doctest::timeout(300)) {
  const int trials = 10000;
  const std::uint64_t n = 4096;
  int hits01 = 0, hits001 = 0;
  for (int t = 0; t < trials; ++t) {
    const BitSequence x = uniform_bits(n, derive_seed(0x11e7e1, t));
    const double p = compression_pvalue(x, 0);
    hits01 += p <= 0.01;
    hits001 += p <= 0.001;
  }
  CHECK(static_cast<double>(hits01) / trials <=
        0.01 + 3 * std::sqrt(0.01 / trials));
  CHECK(static_cast<double>(hits001) / trials <=
        0.001 + 3 * std::sqrt(0.001 / trials));
}

TEST_CASE("codelength rate converges to the entropy" * doctest::timeout(300)) {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto src = make_source(GeneratorSpec{BernoulliSpec{0.7}, seed});
    const BitSequence x = src->generate(1000000);
    const double rate = code_length(x, 0) / 1e6;
    CHECK(rate > 0.8713);
    CHECK(rate < 0.8913);
  }
}

TEST_CASE("uniform data is incompressible per bit" * doctest::timeout(300)) {
  for (std::uint64_t seed : {10, 11, 12}) {
    const BitSequence x = uniform_bits(1000000, seed);
    CHECK(std::fabs(tau_phi(x, 0)) / 1e6 < 0.01);
    CHECK(std::fabs(tau_phi(x, 1)) / 1e6 < 0.01);
  }
}

TEST_CASE("biased sources are rejected at small alpha" * doctest::timeout(300)) {
  int rejections = 0;
  for (int seed = 0; seed < 100; ++seed) {
    auto src = make_source(GeneratorSpec{BernoulliSpec{0.45}, 0x45000u + seed});
    const BitSequence x = src->generate(100000);
    rejections += compression_pvalue(x, 0) <= 0.001;
  }
  CHECK(rejections >= 99);
}
