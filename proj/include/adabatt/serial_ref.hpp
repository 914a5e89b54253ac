#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "adabatt/bitstream.hpp"

namespace adabatt::serial_ref {

// Literal one-bit-at-a-time implementations of the kernels. These are the
// reference the parallel versions are tested and benchmarked against; they
// are not used on any production path.

std::uint64_t count_ones(const BitSequence& x);
std::uint64_t count_runs(const BitSequence& x);
std::array<std::uint64_t, 4> pair_counts_cyclic(const BitSequence& x);
std::uint64_t block_deviation_sq(const BitSequence& x, std::uint32_t block_bits);

struct WalkExtrema {
  std::int64_t max_s = 0;
  std::int64_t min_s = 0;
};
WalkExtrema cusum_extrema(const BitSequence& x);

std::vector<std::array<std::uint64_t, 2>> context_counts(const BitSequence& x,
                                                         int order);

/// Sequential add-half estimator codelength: accumulates -log2 of each
/// symbol's predictive probability, one update per symbol. Matches the
/// closed-form implementation in universal_code up to float rounding.
double code_length(const BitSequence& x, int order);

}  // namespace adabatt::serial_ref
