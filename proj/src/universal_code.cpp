#include "adabatt/universal_code.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adabatt/kernels.hpp"
#include "adabatt/special_functions.hpp"

namespace adabatt {

double code_length(const BitSequence& x, int order) {
  if (order < 0 || order > 16)
    throw std::invalid_argument("code_length: order must be in [0, 16]");
  const std::uint64_t n = x.size();
  if (n == 0) return 0.0;
  const std::uint64_t k = static_cast<std::uint64_t>(order);
  if (n <= k) return static_cast<double>(n);
  const auto counts = kernels::context_counts(x, order);
  long double len = static_cast<long double>(k);
  for (const auto& c : counts) len += sf::kt_log2_loss(c[0], c[1]);
  return static_cast<double>(len);
}

double tau_phi(const BitSequence& x, int order) {
  return static_cast<double>(x.size()) - code_length(x, order);
}

double compression_pvalue(const BitSequence& x, int order) {
  const double tau = tau_phi(x, order);
  const double p = std::min(1.0, std::exp2(-tau));
  return std::max(p, 1e-300);
}

}  // namespace adabatt
