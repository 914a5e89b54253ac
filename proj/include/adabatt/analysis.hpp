#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "adabatt/bitstream.hpp"
#include "adabatt/generators.hpp"

namespace adabatt {

/// A source with analytically known per-word probabilities: Bernoulli(p)
/// or a two-state Markov chain started from its stationary distribution.
class KnownSource {
 public:
  static KnownSource bernoulli(double p);
  static KnownSource markov(const std::array<std::array<double, 2>, 2>& transition);

  bool is_bernoulli() const { return std::holds_alternative<BernoulliSpec>(kind_); }
  double bernoulli_p() const;

  /// nu(x), the probability of the word under the source.
  double prob(const BitSequence& x) const;
  /// Shannon entropy rate h(nu) in bits/symbol.
  double entropy_rate() const;
  /// Spec for sampling x ~ nu.
  GeneratorSpec sampling_spec(std::uint64_t seed) const;

 private:
  explicit KnownSource(std::variant<BernoulliSpec, MarkovSpec> kind)
      : kind_(std::move(kind)) {}
  std::variant<BernoulliSpec, MarkovSpec> kind_;
};

// --------------------------------------------------------------------------
// Exact Neyman-Pearson machinery
// --------------------------------------------------------------------------

/// log2 of the exact NP p-value for a Bernoulli(p) alternative, from the
/// count of ones. The p-value is |{y : nu(y) > nu(x)}| / 2^n, a binomial
/// tail; for n <= 63 it is summed in exact integer arithmetic, above that
/// in the log domain (log-sum-exp over extended precision), so the result
/// is meaningful far below double underflow. Returns -infinity when the
/// strict-inequality set is empty (p == 1/2, or x is the unique mode).
long double np_log2_pvalue(std::uint64_t ones, std::uint64_t n, double p);

/// Exact NP p-value. Bernoulli sources use the closed form at any n;
/// Markov sources are enumerated exhaustively and require n <= 24.
/// Note the strict inequality makes the value 0 when no word is strictly
/// more probable (in particular for p == 1/2, where all words tie).
double np_pvalue_exact(const BitSequence& x, const KnownSource& source);

/// |C_NP(alpha)| = floor(alpha * 2^n), the non-randomized critical region
/// size; n <= 62. Markov sources additionally require n <= 24.
std::uint64_t np_critical_region_size(double alpha, unsigned n,
                                      const KnownSource& source);

/// The region itself as word values (x1 at the MSB), most probable first;
/// n <= 20.
std::vector<std::uint32_t> np_critical_region(double alpha, unsigned n,
                                              const KnownSource& source);

/// Smallest n with n > -log2(alpha) / (1 - h); nullopt signals the
/// infinite-sample case h == 1.
std::optional<std::uint64_t> required_sample_size(double alpha, double h);

/// Literal evaluation of the p-value definition by enumerating all words
/// of x's length (n <= 20): P_uniform{ tau(y) > tau(x) }.
double exhaustive_pvalue_oracle(
    const std::function<double(const BitSequence&)>& statistic,
    const BitSequence& x);

// --------------------------------------------------------------------------
// Limit verification
// --------------------------------------------------------------------------

enum class TheoremArm { np, compression };

struct ConvergenceRow {
  std::uint64_t n = 0;
  double mean_gamma = 0.0;
  double std_gamma = 0.0;
  double target = 0.0;  // 1 - h(nu)
  double abs_error = 0.0;
};

/// Samples x ~ nu for each (n, seed) cell, computes gamma = -log2(pi)/n
/// under the chosen test, and tabulates mean/std against 1 - h(nu).
/// The NP arm requires a Bernoulli source with p not in {0, 1/2, 1}.
std::vector<ConvergenceRow> verify_theorem1(const KnownSource& source,
                                            TheoremArm arm, int kt_order,
                                            std::span<const std::uint64_t> n_grid,
                                            int num_seeds,
                                            std::uint64_t seed_base);

}  // namespace adabatt
