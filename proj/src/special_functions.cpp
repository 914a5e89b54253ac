#include "adabatt/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace adabatt::sf {
namespace {

constexpr int kMaxIter = 2000;
constexpr double kEps = 1e-16;
constexpr double kFpMin = 1e-300;

// Lower regularized P(a,x) by power series.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("igamc: series did not converge");
}

// Upper regularized Q(a,x) by modified Lentz continued fraction.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("igamc: continued fraction did not converge");
}

}  // namespace

double igamc(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("igamc: a > 0, x >= 0 required");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

double kt_log2_loss(std::uint64_t zeros, std::uint64_t ones) {
  if (zeros == 0 && ones == 0) return 0.0;
  static const long double kLgHalf = lgammal(0.5L);
  const long double a = static_cast<long double>(zeros);
  const long double b = static_cast<long double>(ones);
  const long double log_p =
      lgammal(a + 0.5L) + lgammal(b + 0.5L) - 2.0L * kLgHalf - lgammal(a + b + 1.0L);
  return static_cast<double>(-log_p / 0.69314718055994530941723212145818L);
}

}  // namespace adabatt::sf
