#include "adabatt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "adabatt/kernels.hpp"
#include "adabatt/universal_code.hpp"

namespace adabatt {
namespace {

constexpr long double kLn2 = 0.69314718055994530941723212145818L;
constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

long double log2_binom(std::uint64_t n, std::uint64_t j) {
  return (lgammal(static_cast<long double>(n) + 1.0L) -
          lgammal(static_cast<long double>(j) + 1.0L) -
          lgammal(static_cast<long double>(n - j) + 1.0L)) /
         kLn2;
}

// C(n, j) exactly, n <= 63.
unsigned __int128 binom_exact(std::uint64_t n, std::uint64_t j) {
  if (j > n) return 0;
  j = std::min(j, n - j);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= j; ++i) {
    c *= n - j + i;
    c /= i;
  }
  return c;
}

// Sum of C(n, j) for j in [lo, hi], n <= 63 (fits in 64 bits since the
// full row sums to 2^n <= 2^63).
std::uint64_t binom_range_sum(std::uint64_t n, std::uint64_t lo, std::uint64_t hi) {
  unsigned __int128 c = binom_exact(n, lo);
  unsigned __int128 sum = 0;
  for (std::uint64_t j = lo;; ++j) {
    sum += c;
    if (j == hi) break;
    c = c * (n - j) / (j + 1);
  }
  return static_cast<std::uint64_t>(sum);
}

// log2 of sum of C(n, j)/2^n for j in [lo, hi] at large n: log-sum-exp
// relative to the largest term, expanding outward from the in-range mode.
long double log2_binom_tail(std::uint64_t n, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t jmax = std::clamp<std::uint64_t>(n / 2, lo, hi);
  long double sum = 1.0L;  // the jmax term, relative to itself
  // upward from jmax
  long double t = 1.0L;
  for (std::uint64_t j = jmax; j < hi; ++j) {
    t *= static_cast<long double>(n - j) / static_cast<long double>(j + 1);
    sum += t;
    if (t < sum * 1e-24L) break;
  }
  // downward from jmax
  t = 1.0L;
  for (std::uint64_t j = jmax; j > lo; --j) {
    t *= static_cast<long double>(j) / static_cast<long double>(n - j + 1);
    sum += t;
    if (t < sum * 1e-24L) break;
  }
  return log2_binom(n, jmax) + log2l(sum) - static_cast<long double>(n);
}

double markov_word_prob(const MarkovSpec& m, std::uint32_t w, unsigned n) {
  const auto pi = markov_stationary(m);
  unsigned prev = (w >> (n - 1)) & 1u;
  double p = pi[prev];
  for (unsigned i = 2; i <= n; ++i) {
    const unsigned cur = (w >> (n - i)) & 1u;
    p *= m.transition[prev][cur];
    prev = cur;
  }
  return p;
}

}  // namespace

// --------------------------------------------------------------------------
// KnownSource
// --------------------------------------------------------------------------

KnownSource KnownSource::bernoulli(double p) {
  GeneratorSpec spec{BernoulliSpec{p}, 0};
  validate(spec);
  return KnownSource(BernoulliSpec{p});
}

KnownSource KnownSource::markov(
    const std::array<std::array<double, 2>, 2>& transition) {
  GeneratorSpec spec{MarkovSpec{transition}, 0};
  validate(spec);
  return KnownSource(MarkovSpec{transition});
}

double KnownSource::bernoulli_p() const {
  if (!is_bernoulli())
    throw std::logic_error("KnownSource: not a Bernoulli source");
  return std::get<BernoulliSpec>(kind_).p;
}

double KnownSource::prob(const BitSequence& x) const {
  const std::uint64_t n = x.size();
  if (n == 0) return 1.0;
  if (const auto* b = std::get_if<BernoulliSpec>(&kind_)) {
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < n; ++i) ones += x.bit(i);
    return std::pow(b->p, static_cast<double>(ones)) *
           std::pow(1.0 - b->p, static_cast<double>(n - ones));
  }
  const auto& m = std::get<MarkovSpec>(kind_);
  const auto pi = markov_stationary(m);
  unsigned prev = x.bit(0);
  double p = pi[prev];
  for (std::uint64_t i = 1; i < n; ++i) {
    const unsigned cur = x.bit(i);
    p *= m.transition[prev][cur];
    prev = cur;
  }
  return p;
}

double KnownSource::entropy_rate() const {
  if (const auto* b = std::get_if<BernoulliSpec>(&kind_))
    return binary_entropy(b->p);
  const auto& m = std::get<MarkovSpec>(kind_);
  const auto pi = markov_stationary(m);
  return pi[0] * binary_entropy(m.transition[0][1]) +
         pi[1] * binary_entropy(m.transition[1][1]);
}

GeneratorSpec KnownSource::sampling_spec(std::uint64_t seed) const {
  if (const auto* b = std::get_if<BernoulliSpec>(&kind_))
    return GeneratorSpec{*b, seed};
  return GeneratorSpec{std::get<MarkovSpec>(kind_), seed};
}

// --------------------------------------------------------------------------
// NP p-values
// --------------------------------------------------------------------------

long double np_log2_pvalue(std::uint64_t ones, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("np_log2_pvalue: p must be in [0, 1]");
  if (n == 0) return kNegInf;
  if (p == 0.5) return kNegInf;  // all words tie; the strict set is empty
  if (p == 1.0)
    return ones == n ? kNegInf : -static_cast<long double>(n);
  if (p == 0.0)
    return ones == 0 ? kNegInf : -static_cast<long double>(n);

  // nu is strictly monotone in the ones count, so the strict set is a
  // binomial tail under the uniform measure.
  std::uint64_t lo, hi;
  if (p > 0.5) {
    if (ones >= n) return kNegInf;
    lo = ones + 1;
    hi = n;
  } else {
    if (ones == 0) return kNegInf;
    lo = 0;
    hi = ones - 1;
  }
  if (n <= 63) {
    const std::uint64_t count = binom_range_sum(n, lo, hi);
    if (count == 0) return kNegInf;
    return log2l(static_cast<long double>(count)) - static_cast<long double>(n);
  }
  return log2_binom_tail(n, lo, hi);
}

double np_pvalue_exact(const BitSequence& x, const KnownSource& source) {
  const std::uint64_t n = x.size();
  if (source.is_bernoulli()) {
    const std::uint64_t ones = kernels::count_ones(x);
    if (n <= 63) {
      // Exact integer path; matches exhaustive enumeration bit for bit.
      const double p = source.bernoulli_p();
      if (n == 0 || p == 0.5) return 0.0;
      std::uint64_t count = 0;
      if (p == 1.0) {
        count = ones == n ? 0 : 1;
      } else if (p == 0.0) {
        count = ones == 0 ? 0 : 1;
      } else if (p > 0.5) {
        count = ones >= n ? 0 : binom_range_sum(n, ones + 1, n);
      } else {
        count = ones == 0 ? 0 : binom_range_sum(n, 0, ones - 1);
      }
      return std::ldexp(static_cast<double>(count), -static_cast<int>(n));
    }
    const long double l2 = np_log2_pvalue(ones, n, source.bernoulli_p());
    return static_cast<double>(exp2l(l2));
  }
  if (n > 24)
    throw std::invalid_argument(
        "np_pvalue_exact: Markov sources are enumerated exhaustively and "
        "require n <= 24");
  if (n == 0) return 0.0;
  const auto spec = source.sampling_spec(0);
  const auto& m = std::get<MarkovSpec>(spec.kind);
  std::uint32_t xw = 0;
  for (std::uint64_t i = 0; i < n; ++i) xw = (xw << 1) | x.bit(i);
  const double px = markov_word_prob(m, xw, static_cast<unsigned>(n));
  const std::int64_t total = std::int64_t{1} << n;
  std::uint64_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
  for (std::int64_t w = 0; w < total; ++w) {
    count += markov_word_prob(m, static_cast<std::uint32_t>(w),
                              static_cast<unsigned>(n)) > px;
  }
  return std::ldexp(static_cast<double>(count), -static_cast<int>(n));
}

std::uint64_t np_critical_region_size(double alpha, unsigned n,
                                      const KnownSource& source) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("np_critical_region_size: alpha must be in [0, 1]");
  if (n > 62)
    throw std::invalid_argument("np_critical_region_size: n must be <= 62");
  if (!source.is_bernoulli() && n > 24)
    throw std::invalid_argument(
        "np_critical_region_size: Markov sources require n <= 24");
  return static_cast<std::uint64_t>(
      floorl(static_cast<long double>(alpha) * exp2l(static_cast<long double>(n))));
}

std::vector<std::uint32_t> np_critical_region(double alpha, unsigned n,
                                              const KnownSource& source) {
  if (n > 20) throw std::invalid_argument("np_critical_region: n must be <= 20");
  const std::uint64_t size = np_critical_region_size(alpha, n, source);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<std::uint32_t> words(total);
  std::iota(words.begin(), words.end(), 0u);
  std::vector<double> probs(total);
  for (std::uint64_t w = 0; w < total; ++w)
    probs[w] = source.prob(BitSequence::from_word_bits(w, n));
  std::stable_sort(words.begin(), words.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return probs[a] > probs[b];
                   });
  words.resize(size);
  return words;
}

std::optional<std::uint64_t> required_sample_size(double alpha, double h) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("required_sample_size: alpha must be in (0, 1)");
  if (!(h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("required_sample_size: h must be in [0, 1]");
  if (h == 1.0) return std::nullopt;  // sample size grows without bound
  const long double v = -log2l(static_cast<long double>(alpha)) / (1.0L - h);
  return static_cast<std::uint64_t>(ceill(v));
}

double exhaustive_pvalue_oracle(
    const std::function<double(const BitSequence&)>& statistic,
    const BitSequence& x) {
  const std::uint64_t n = x.size();
  if (n > 20)
    throw std::invalid_argument("exhaustive_pvalue_oracle: n must be <= 20");
  const double tx = statistic(x);
  const std::int64_t total = std::int64_t{1} << n;
  std::uint64_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
  for (std::int64_t w = 0; w < total; ++w) {
    count += statistic(BitSequence::from_word_bits(static_cast<std::uint64_t>(w),
                                                   static_cast<unsigned>(n))) > tx;
  }
  return std::ldexp(static_cast<double>(count), -static_cast<int>(n));
}

// --------------------------------------------------------------------------
// Limit verification
// --------------------------------------------------------------------------

std::vector<ConvergenceRow> verify_theorem1(const KnownSource& source,
                                            TheoremArm arm, int kt_order,
                                            std::span<const std::uint64_t> n_grid,
                                            int num_seeds,
                                            std::uint64_t seed_base) {
  if (num_seeds < 1)
    throw std::invalid_argument("verify_theorem1: num_seeds must be >= 1");
  if (arm == TheoremArm::np) {
    if (!source.is_bernoulli())
      throw std::invalid_argument(
          "verify_theorem1: the NP arm requires a Bernoulli source");
    const double p = source.bernoulli_p();
    if (p == 0.0 || p == 0.5 || p == 1.0)
      throw std::invalid_argument(
          "verify_theorem1: the NP arm is degenerate at p in {0, 1/2, 1}");
  }
  const double target = 1.0 - source.entropy_rate();
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_grid.size());

  for (const std::uint64_t n : n_grid) {
    if (n == 0) throw std::invalid_argument("verify_theorem1: n must be >= 1");
    std::vector<double> gammas(num_seeds, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < num_seeds; ++s) {
      const std::uint64_t seed =
          derive_seed(seed_base, n * 1000003ull + static_cast<std::uint64_t>(s));
      auto src = make_source(source.sampling_spec(seed));
      const BitSequence x = src->generate(n);
      double gamma;
      if (arm == TheoremArm::np) {
        const long double l2 = np_log2_pvalue(kernels::count_ones(x), n,
                                              source.bernoulli_p());
        gamma = std::isinf(static_cast<double>(l2))
                    ? 1.0  // x was the unique mode; gamma is capped at 1
                    : static_cast<double>(-l2) / static_cast<double>(n);
      } else {
        gamma = std::max(0.0, tau_phi(x, kt_order)) / static_cast<double>(n);
      }
      gammas[s] = gamma;
    }
    ConvergenceRow row;
    row.n = n;
    row.target = target;
    const double mean =
        std::accumulate(gammas.begin(), gammas.end(), 0.0) / num_seeds;
    double var = 0.0;
    for (double g : gammas) var += (g - mean) * (g - mean);
    row.mean_gamma = mean;
    row.std_gamma = num_seeds > 1 ? std::sqrt(var / (num_seeds - 1)) : 0.0;
    row.abs_error = std::fabs(mean - target);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace adabatt
