#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "adabatt/bitstream.hpp"

namespace adabatt::kernels {

// Data-parallel primitives behind the battery statistics. All reductions
// accumulate integers, so results are identical for any thread count.

std::uint64_t count_ones(const BitSequence& x);

/// Ones in the half-open bit range [start, start+length).
std::uint64_t ones_in_range(const BitSequence& x, std::uint64_t start,
                            std::uint64_t length);

/// Number of maximal runs (n >= 1 gives >= 1; n == 0 gives 0).
std::uint64_t count_runs(const BitSequence& x);

/// Count of cyclically adjacent (1,1) pairs: positions p with
/// x_p = x_{p+1 mod n} = 1, one pair per position.
std::uint64_t count_pairs11_cyclic(const BitSequence& x);

/// Cyclic overlapping 2-gram counts indexed c[2*a+b] for pair (a,b).
std::array<std::uint64_t, 4> pair_counts_cyclic(const BitSequence& x);

/// Sum over full M-bit blocks of (2*ones(block) - M)^2; the tail block is
/// discarded.
std::uint64_t block_deviation_sq(const BitSequence& x, std::uint32_t block_bits);

struct WalkExtrema {
  std::int64_t max_s = 0;  // max over k >= 1 of S_k
  std::int64_t min_s = 0;  // min over k >= 1 of S_k
};

/// Extrema of the partial sums S_k of the +/-1 walk (bit 1 -> +1).
WalkExtrema cusum_extrema(const BitSequence& x);

/// Per-context symbol counts for order-k contexts: counts[ctx][s] is the
/// number of positions p >= k (0-based) with preceding k bits equal to ctx
/// (oldest bit at the context MSB) and x_p == s. k must be <= 16.
std::vector<std::array<std::uint64_t, 2>> context_counts(const BitSequence& x,
                                                         int order);

}  // namespace adabatt::kernels
