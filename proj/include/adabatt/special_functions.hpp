#pragma once

#include <cstdint>

namespace adabatt::sf {

/// Regularized upper incomplete gamma function Q(a, x), a > 0, x >= 0.
/// Series/continued-fraction evaluation, better than 1e-10 relative.
double igamc(double a, double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Floor division for possibly negative numerators.
std::int64_t floor_div(std::int64_t num, std::int64_t den);

/// -log2 of the Krichevsky-Trofimov block probability for a context that
/// saw `zeros` zeros and `ones` ones (in any order).
double kt_log2_loss(std::uint64_t zeros, std::uint64_t ones);

}  // namespace adabatt::sf
