#include "adabatt/kernels.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace adabatt::kernels {
namespace {

constexpr std::uint64_t kAllOnes = ~0ull;

struct ByteWalk {
  std::int8_t sum;
  std::int8_t max;
  std::int8_t min;
};

// Prefix-sum extrema of the +/-1 walk over one byte, MSB first.
constexpr std::array<ByteWalk, 256> kByteWalk = [] {
  std::array<ByteWalk, 256> t{};
  for (int v = 0; v < 256; ++v) {
    int s = 0, mx = -9, mn = 9;
    for (int j = 7; j >= 0; --j) {
      s += ((v >> j) & 1) ? 1 : -1;
      mx = std::max(mx, s);
      mn = std::min(mn, s);
    }
    t[v] = {static_cast<std::int8_t>(s), static_cast<std::int8_t>(mx),
            static_cast<std::int8_t>(mn)};
  }
  return t;
}();

std::uint64_t range_popcount(std::span<const std::uint64_t> ws,
                             std::uint64_t start, std::uint64_t end) {
  if (start >= end) return 0;
  const std::uint64_t fw = start >> 6;
  const std::uint64_t lw = (end - 1) >> 6;
  const std::uint64_t head = kAllOnes >> (start & 63);
  const unsigned tail_bits = static_cast<unsigned>(end & 63);
  const std::uint64_t tail = tail_bits ? (kAllOnes << (64 - tail_bits)) : kAllOnes;
  if (fw == lw) return std::popcount(ws[fw] & head & tail);
  std::uint64_t c = std::popcount(ws[fw] & head) + std::popcount(ws[lw] & tail);
  for (std::uint64_t w = fw + 1; w < lw; ++w) c += std::popcount(ws[w]);
  return c;
}

}  // namespace

std::uint64_t count_ones(const BitSequence& x) {
  const auto ws = x.words();
  const std::ptrdiff_t nw = static_cast<std::ptrdiff_t>(ws.size());
  std::uint64_t total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (std::ptrdiff_t i = 0; i < nw; ++i) total += std::popcount(ws[i]);
  return total;
}

std::uint64_t ones_in_range(const BitSequence& x, std::uint64_t start,
                            std::uint64_t length) {
  if (start > x.size() || length > x.size() - start)
    throw std::out_of_range("ones_in_range: range exceeds sequence length");
  return range_popcount(x.words(), start, start + length);
}

std::uint64_t count_runs(const BitSequence& x) {
  const std::uint64_t n = x.size();
  if (n == 0) return 0;
  const auto ws = x.words();
  const std::ptrdiff_t full = static_cast<std::ptrdiff_t>(ws.size()) - 1;
  std::uint64_t transitions = 0;
// Words 0..W-2 are complete and have a successor, so all 63 intra-word
// pairs plus the cross-word pair are in range.
#pragma omp parallel for reduction(+ : transitions) schedule(static)
  for (std::ptrdiff_t i = 0; i < full; ++i) {
    const std::uint64_t w = ws[i];
    transitions += std::popcount((w ^ (w << 1)) & ~1ull);
    transitions += (w & 1) ^ (ws[i + 1] >> 63);
  }
  // Last word: pairs (p, p+1) for p in [64*(W-1), n-2].
  for (std::uint64_t p = 64 * static_cast<std::uint64_t>(full); p + 1 < n; ++p)
    transitions += x.bit(p) != x.bit(p + 1);
  return transitions + 1;
}

std::uint64_t count_pairs11_cyclic(const BitSequence& x) {
  const std::uint64_t n = x.size();
  if (n == 0) return 0;
  const auto ws = x.words();
  const std::ptrdiff_t full = static_cast<std::ptrdiff_t>(ws.size()) - 1;
  std::uint64_t pairs = 0;
#pragma omp parallel for reduction(+ : pairs) schedule(static)
  for (std::ptrdiff_t i = 0; i < full; ++i) {
    const std::uint64_t w = ws[i];
    pairs += std::popcount((w & (w << 1)) & ~1ull);
    pairs += (w & 1) & (ws[i + 1] >> 63);
  }
  for (std::uint64_t p = 64 * static_cast<std::uint64_t>(full); p + 1 < n; ++p)
    pairs += x.bit(p) & x.bit(p + 1);
  pairs += x.bit(n - 1) & x.bit(0);  // wrap-around pair
  return pairs;
}

std::array<std::uint64_t, 4> pair_counts_cyclic(const BitSequence& x) {
  const std::uint64_t n = x.size();
  if (n == 0) return {0, 0, 0, 0};
  const std::uint64_t k = count_ones(x);
  const std::uint64_t c11 = count_pairs11_cyclic(x);
  // In a cycle every position starts exactly one pair, and the number of
  // 0->1 transitions equals the number of 1->0 transitions.
  const std::uint64_t c10 = k - c11;
  const std::uint64_t c01 = k - c11;
  const std::uint64_t c00 = n - 2 * k + c11;
  return {c00, c01, c10, c11};
}

std::uint64_t block_deviation_sq(const BitSequence& x, std::uint32_t block_bits) {
  if (block_bits == 0) throw std::invalid_argument("block_deviation_sq: block size 0");
  const std::ptrdiff_t blocks =
      static_cast<std::ptrdiff_t>(x.size() / block_bits);
  std::uint64_t acc = 0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::int64_t ones = static_cast<std::int64_t>(range_popcount(
        x.words(), static_cast<std::uint64_t>(b) * block_bits,
        (static_cast<std::uint64_t>(b) + 1) * block_bits));
    const std::int64_t d = 2 * ones - static_cast<std::int64_t>(block_bits);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return acc;
}

WalkExtrema cusum_extrema(const BitSequence& x) {
  const std::uint64_t n = x.size();
  if (n == 0) return {};
  const std::uint64_t full_bytes = n >> 3;
  constexpr std::uint64_t kChunkBytes = 1u << 15;
  const std::uint64_t chunks = (full_bytes + kChunkBytes - 1) / kChunkBytes;

  struct ChunkStat {
    std::int64_t sum = 0;
    std::int64_t max = std::numeric_limits<std::int64_t>::min();
    std::int64_t min = std::numeric_limits<std::int64_t>::max();
  };
  std::vector<ChunkStat> stats(chunks);
// Fixed chunk boundaries keep the combine step independent of the number
// of threads.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::uint64_t b0 = static_cast<std::uint64_t>(c) * kChunkBytes;
    const std::uint64_t b1 = std::min(full_bytes, b0 + kChunkBytes);
    ChunkStat st;
    for (std::uint64_t b = b0; b < b1; ++b) {
      const ByteWalk& bw = kByteWalk[x.byte(b)];
      st.max = std::max(st.max, st.sum + bw.max);
      st.min = std::min(st.min, st.sum + bw.min);
      st.sum += bw.sum;
    }
    stats[c] = st;
  }

  std::int64_t run = 0;
  std::int64_t gmax = std::numeric_limits<std::int64_t>::min();
  std::int64_t gmin = std::numeric_limits<std::int64_t>::max();
  for (const ChunkStat& st : stats) {
    if (st.max != std::numeric_limits<std::int64_t>::min()) {
      gmax = std::max(gmax, run + st.max);
      gmin = std::min(gmin, run + st.min);
    }
    run += st.sum;
  }
  for (std::uint64_t p = full_bytes * 8; p < n; ++p) {
    run += x.bit(p) ? 1 : -1;
    gmax = std::max(gmax, run);
    gmin = std::min(gmin, run);
  }
  return {gmax, gmin};
}

std::vector<std::array<std::uint64_t, 2>> context_counts(const BitSequence& x,
                                                         int order) {
  if (order < 0 || order > 16)
    throw std::invalid_argument("context_counts: order must be in [0, 16]");
  const std::uint64_t n = x.size();
  const std::size_t table = std::size_t{1} << order;
  std::vector<std::array<std::uint64_t, 2>> counts(table, {0, 0});
  if (n <= static_cast<std::uint64_t>(order)) return counts;

  if (order == 0) {
    const std::uint64_t ones = count_ones(x);
    counts[0] = {n - ones, ones};
    return counts;
  }

  const std::uint64_t k = static_cast<std::uint64_t>(order);
  const std::uint64_t positions = n - k;  // positions k..n-1
  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t chunks = (positions + kChunk - 1) / kChunk;
  std::vector<std::vector<std::array<std::uint64_t, 2>>> partial(
      chunks, std::vector<std::array<std::uint64_t, 2>>(table, {0, 0}));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::uint64_t p0 = k + static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t p1 = std::min(n, p0 + kChunk);
    auto& local = partial[c];
    const std::uint64_t mask = table - 1;
    std::uint64_t ctx = 0;
    for (std::uint64_t q = p0 - k; q < p0; ++q) ctx = ((ctx << 1) | x.bit(q)) & mask;
    for (std::uint64_t p = p0; p < p1; ++p) {
      const unsigned b = x.bit(p);
      ++local[ctx][b];
      ctx = ((ctx << 1) | b) & mask;
    }
  }
  for (const auto& local : partial)
    for (std::size_t i = 0; i < table; ++i) {
      counts[i][0] += local[i][0];
      counts[i][1] += local[i][1];
    }
  return counts;
}

}  // namespace adabatt::kernels
