#include "adabatt/serial_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adabatt::serial_ref {

std::uint64_t count_ones(const BitSequence& x) {
  std::uint64_t c = 0;
  for (std::uint64_t p = 0; p < x.size(); ++p) c += x.bit(p);
  return c;
}

std::uint64_t count_runs(const BitSequence& x) {
  if (x.empty()) return 0;
  std::uint64_t v = 1;
  for (std::uint64_t p = 0; p + 1 < x.size(); ++p) v += x.bit(p) != x.bit(p + 1);
  return v;
}

std::array<std::uint64_t, 4> pair_counts_cyclic(const BitSequence& x) {
  std::array<std::uint64_t, 4> c{0, 0, 0, 0};
  const std::uint64_t n = x.size();
  for (std::uint64_t p = 0; p < n; ++p) {
    const unsigned a = x.bit(p);
    const unsigned b = x.bit((p + 1) % n);
    ++c[2 * a + b];
  }
  return c;
}

std::uint64_t block_deviation_sq(const BitSequence& x, std::uint32_t block_bits) {
  if (block_bits == 0) throw std::invalid_argument("block_deviation_sq: block size 0");
  const std::uint64_t blocks = x.size() / block_bits;
  std::uint64_t acc = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::int64_t ones = 0;
    for (std::uint64_t p = b * block_bits; p < (b + 1) * block_bits; ++p)
      ones += x.bit(p);
    const std::int64_t d = 2 * ones - static_cast<std::int64_t>(block_bits);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return acc;
}

WalkExtrema cusum_extrema(const BitSequence& x) {
  if (x.empty()) return {};
  std::int64_t s = 0, mx = std::numeric_limits<std::int64_t>::min(),
               mn = std::numeric_limits<std::int64_t>::max();
  for (std::uint64_t p = 0; p < x.size(); ++p) {
    s += x.bit(p) ? 1 : -1;
    mx = std::max(mx, s);
    mn = std::min(mn, s);
  }
  return {mx, mn};
}

std::vector<std::array<std::uint64_t, 2>> context_counts(const BitSequence& x,
                                                         int order) {
  if (order < 0 || order > 16)
    throw std::invalid_argument("context_counts: order must be in [0, 16]");
  const std::uint64_t k = static_cast<std::uint64_t>(order);
  std::vector<std::array<std::uint64_t, 2>> counts(std::size_t{1} << order,
                                                   {0, 0});
  if (x.size() <= k) return counts;
  const std::uint64_t mask = (std::uint64_t{1} << order) - 1;
  std::uint64_t ctx = 0;
  for (std::uint64_t q = 0; q < k; ++q) ctx = ((ctx << 1) | x.bit(q)) & mask;
  for (std::uint64_t p = k; p < x.size(); ++p) {
    const unsigned b = x.bit(p);
    ++counts[ctx][b];
    ctx = ((ctx << 1) | b) & mask;
  }
  return counts;
}

double code_length(const BitSequence& x, int order) {
  if (order < 0 || order > 16)
    throw std::invalid_argument("code_length: order must be in [0, 16]");
  const std::uint64_t k = static_cast<std::uint64_t>(order);
  const std::uint64_t n = x.size();
  double len = 0.0;
  std::vector<std::array<std::uint64_t, 2>> counts(std::size_t{1} << order,
                                                   {0, 0});
  const std::uint64_t mask = order ? (std::uint64_t{1} << order) - 1 : 0;
  std::uint64_t ctx = 0;
  for (std::uint64_t p = 0; p < n; ++p) {
    const unsigned b = x.bit(p);
    if (p < k) {
      // The context is the longest available suffix; each shorter-context
      // table is visited exactly once, so the predictive probability is 1/2.
      len += 1.0;
    } else {
      auto& c = counts[ctx];
      const double pr =
          (static_cast<double>(c[b]) + 0.5) / (static_cast<double>(c[0] + c[1]) + 1.0);
      len -= std::log2(pr);
      ++c[b];
    }
    ctx = ((ctx << 1) | b) & mask;
  }
  return len;
}

}  // namespace adabatt::serial_ref
