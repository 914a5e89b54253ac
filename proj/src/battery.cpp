#include "adabatt/battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "adabatt/kernels.hpp"
#include "adabatt/special_functions.hpp"
#include "adabatt/universal_code.hpp"

namespace adabatt {

double gamma_from_pvalue(double pvalue, std::uint64_t n_bits) {
  if (n_bits == 0) return 0.0;
  const double p = std::min(1.0, std::max(pvalue, kPvalueFloor));
  if (p >= 1.0) return 0.0;
  return -std::log2(p) / static_cast<double>(n_bits);
}

namespace stats {

double monobit_pvalue(const BitSequence& x) {
  const std::uint64_t n = x.size();
  const std::int64_t s =
      2 * static_cast<std::int64_t>(kernels::count_ones(x)) -
      static_cast<std::int64_t>(n);
  const double s_obs = std::fabs(static_cast<double>(s)) /
                       std::sqrt(static_cast<double>(n));
  return std::erfc(s_obs / std::sqrt(2.0));
}

double block_frequency_pvalue(const BitSequence& x, std::uint32_t block_bits) {
  const std::uint64_t blocks = x.size() / block_bits;
  const double chi2 =
      static_cast<double>(kernels::block_deviation_sq(x, block_bits)) /
      static_cast<double>(block_bits);
  return sf::igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0);
}

double runs_pvalue(const BitSequence& x) {
  const double n = static_cast<double>(x.size());
  const double pi1 = static_cast<double>(kernels::count_ones(x)) / n;
  // Frequency prerequisite: a grossly biased sequence fails outright.
  if (std::fabs(pi1 - 0.5) >= 2.0 / std::sqrt(n)) return 0.0;
  const double v = static_cast<double>(kernels::count_runs(x));
  const double num = std::fabs(v - 2.0 * n * pi1 * (1.0 - pi1));
  const double den = 2.0 * std::sqrt(2.0 * n) * pi1 * (1.0 - pi1);
  return std::erfc(num / den);
}

double serial2_pvalue(const BitSequence& x) {
  const double n = static_cast<double>(x.size());
  const auto c = kernels::pair_counts_cyclic(x);
  const std::uint64_t ones = c[2] + c[3];  // c10 + c11 counts each position once
  const std::uint64_t zeros = c[0] + c[1];
  double sum2 = 0.0;
  for (std::uint64_t v : c) sum2 += static_cast<double>(v) * static_cast<double>(v);
  const double psi2 = 4.0 / n * sum2 - n;
  const double sum1 = static_cast<double>(zeros) * static_cast<double>(zeros) +
                      static_cast<double>(ones) * static_cast<double>(ones);
  const double psi1 = 2.0 / n * sum1 - n;
  const double del = std::max(0.0, psi2 - psi1);
  return sf::igamc(1.0, del / 2.0);
}

double cusum_forward_pvalue(const BitSequence& x) {
  const std::uint64_t n = x.size();
  const auto ext = kernels::cusum_extrema(x);
  const std::int64_t z64 = std::max(ext.max_s, -ext.min_s);
  const double z = static_cast<double>(z64);
  const double sqrtn = std::sqrt(static_cast<double>(n));
  const std::int64_t nz = static_cast<std::int64_t>(n) / z64;

  // Terms with |(4k+-1) z| far beyond sqrt(n) contribute nothing at double
  // precision; restrict the index ranges accordingly.
  const std::int64_t reach =
      static_cast<std::int64_t>(10.0 * sqrtn / z) + 2;

  double sum1 = 0.0;
  {
    const std::int64_t lo = std::max(sf::floor_div(-nz + 1, 4), -reach);
    const std::int64_t hi = std::min(sf::floor_div(nz - 1, 4), reach);
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double a = (4.0 * static_cast<double>(k) + 1.0) * z / sqrtn;
      const double b = (4.0 * static_cast<double>(k) - 1.0) * z / sqrtn;
      sum1 += sf::normal_cdf(a) - sf::normal_cdf(b);
    }
  }
  double sum2 = 0.0;
  {
    const std::int64_t lo = std::max(sf::floor_div(-nz - 3, 4), -reach);
    const std::int64_t hi = std::min(sf::floor_div(nz - 1, 4), reach);
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double a = (4.0 * static_cast<double>(k) + 3.0) * z / sqrtn;
      const double b = (4.0 * static_cast<double>(k) + 1.0) * z / sqrtn;
      sum2 += sf::normal_cdf(a) - sf::normal_cdf(b);
    }
  }
  return std::clamp(1.0 - sum1 + sum2, 0.0, 1.0);
}

}  // namespace stats

// --------------------------------------------------------------------------
// Registry
// --------------------------------------------------------------------------

namespace {

TestDescriptor make_simple(std::string id, std::uint64_t min_length,
                           std::function<double(const BitSequence&)> fn) {
  TestDescriptor d;
  d.id = std::move(id);
  d.min_length = min_length;
  d.pvalue_fn = std::move(fn);
  return d;
}

}  // namespace

TestRegistry::TestRegistry() {
  add("monobit", [](const BatteryParams&) {
    return std::vector<TestDescriptor>{
        make_simple("monobit", 100, stats::monobit_pvalue)};
  });
  add("block_frequency", [](const BatteryParams& p) {
    const std::uint32_t m = p.block_size;
    return std::vector<TestDescriptor>{make_simple(
        "block_frequency", 2ull * m,
        [m](const BitSequence& x) { return stats::block_frequency_pvalue(x, m); })};
  });
  add("runs", [](const BatteryParams&) {
    return std::vector<TestDescriptor>{
        make_simple("runs", 100, stats::runs_pvalue)};
  });
  add("serial2", [](const BatteryParams&) {
    return std::vector<TestDescriptor>{
        make_simple("serial2", 128, stats::serial2_pvalue)};
  });
  add("cusum", [](const BatteryParams&) {
    return std::vector<TestDescriptor>{
        make_simple("cusum", 100, stats::cusum_forward_pvalue)};
  });
  add("compression", [](const BatteryParams& p) {
    std::vector<TestDescriptor> out;
    for (int k : p.kt_orders) {
      out.push_back(make_simple(
          "compression.k" + std::to_string(k), 64,
          [k](const BitSequence& x) { return compression_pvalue(x, k); }));
    }
    return out;
  });
}

TestRegistry& TestRegistry::instance() {
  static TestRegistry reg;
  return reg;
}

void TestRegistry::add(const std::string& id, Factory factory) {
  for (auto& [existing, f] : factories_) {
    if (existing == id) {
      f = std::move(factory);
      return;
    }
  }
  factories_.emplace_back(id, std::move(factory));
}

bool TestRegistry::contains(const std::string& id) const {
  for (const auto& [existing, f] : factories_)
    if (existing == id) return true;
  return false;
}

std::vector<TestDescriptor> TestRegistry::make(const std::string& id,
                                               const BatteryParams& params) const {
  for (const auto& [existing, f] : factories_)
    if (existing == id) return f(params);
  throw std::invalid_argument("unknown test id '" + id + "'");
}

std::vector<std::string> TestRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(factories_.size());
  for (const auto& [id, f] : factories_) out.push_back(id);
  return out;
}

std::vector<TestDescriptor> default_battery(const BatteryParams& params) {
  static const std::vector<std::string> kOrder = {
      "monobit", "block_frequency", "runs", "serial2", "cusum", "compression"};
  return make_battery(kOrder, params);
}

std::vector<TestDescriptor> make_battery(std::span<const std::string> ids,
                                         const BatteryParams& params) {
  std::vector<TestDescriptor> battery;
  for (const auto& id : ids) {
    auto descs = TestRegistry::instance().make(id, params);
    battery.insert(battery.end(), std::make_move_iterator(descs.begin()),
                   std::make_move_iterator(descs.end()));
  }
  for (std::size_t i = 0; i < battery.size(); ++i)
    for (std::size_t j = i + 1; j < battery.size(); ++j)
      if (battery[i].id == battery[j].id)
        throw std::invalid_argument("duplicate test id '" + battery[i].id + "'");
  return battery;
}

// --------------------------------------------------------------------------
// Execution
// --------------------------------------------------------------------------

TestResult run_test(const TestDescriptor& desc, const BitSequence& x) {
  if (x.size() < desc.min_length)
    throw std::invalid_argument("test '" + desc.id + "' needs at least " +
                                std::to_string(desc.min_length) +
                                " bits, got " + std::to_string(x.size()));
  const auto t0 = std::chrono::steady_clock::now();
  double p = desc.pvalue_fn(x);
  const auto t1 = std::chrono::steady_clock::now();
  p = std::min(1.0, std::max(p, kPvalueFloor));

  TestResult r;
  r.test_id = desc.id;
  r.n_bits = x.size();
  r.pvalue = p;
  r.gamma = gamma_from_pvalue(p, x.size());
  r.seconds = std::chrono::duration<double>(t1 - t0).count();
  return r;
}

Verdict run_battery(std::span<const TestDescriptor> battery,
                    const BitSequence& x, double alpha_total) {
  if (!(alpha_total > 0.0 && alpha_total < 1.0))
    throw std::invalid_argument("run_battery: alpha must be in (0, 1)");
  if (battery.empty()) throw std::invalid_argument("run_battery: empty battery");

  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  const double alpha_each = alpha_total / static_cast<double>(battery.size());
  for (const TestDescriptor& desc : battery) {
    if (x.size() < desc.min_length) {
      v.warnings.push_back("skipped '" + desc.id + "': needs " +
                           std::to_string(desc.min_length) + " bits, got " +
                           std::to_string(x.size()));
      continue;
    }
    FinalEntry e;
    e.result = run_test(desc, x);
    e.alpha = alpha_each;
    e.rejected = e.result.pvalue <= alpha_each;
    v.reject = v.reject || e.rejected;
    v.cost.bits_per_test.emplace_back(desc.id, x.size());
    v.cost.total_bits += x.size();
    v.finals.push_back(std::move(e));
  }
  v.cost.cost_ratio = 1.0;
  v.cost.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

void calibrate_speed(std::span<TestDescriptor> battery,
                     std::uint64_t probe_length, std::uint64_t seed) {
  for (const TestDescriptor& d : battery)
    if (probe_length < d.min_length)
      throw std::invalid_argument("calibrate_speed: probe shorter than '" +
                                  d.id + "' minimum length");
  const BitSequence probe = uniform_bits(probe_length, seed);
  for (TestDescriptor& d : battery) {
    const auto t0 = std::chrono::steady_clock::now();
    int reps = 0;
    double elapsed = 0.0;
    do {
      (void)d.pvalue_fn(probe);
      ++reps;
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    } while (elapsed < 0.02 && reps < 1000);
    d.speed_bits_per_sec =
        static_cast<double>(probe_length) * reps / std::max(elapsed, 1e-9);
  }
}

BitSequence uniform_bits(std::uint64_t n_bits, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  BitWriter w;
  w.reserve(n_bits);
  std::uint64_t remaining = n_bits;
  while (remaining >= 64) {
    w.push_msb_bits(eng(), 64);
    remaining -= 64;
  }
  if (remaining > 0)
    w.push_msb_bits(eng() >> (64 - remaining), static_cast<unsigned>(remaining));
  return std::move(w).take();
}

bool equivalent(const Verdict& a, const Verdict& b) {
  if (a.reject != b.reject || a.finals.size() != b.finals.size() ||
      a.trace.size() != b.trace.size() || a.warnings != b.warnings)
    return false;
  auto same_result = [](const TestResult& x, const TestResult& y) {
    return x.test_id == y.test_id && x.n_bits == y.n_bits &&
           x.pvalue == y.pvalue && x.gamma == y.gamma;
  };
  for (std::size_t i = 0; i < a.finals.size(); ++i) {
    if (!same_result(a.finals[i].result, b.finals[i].result) ||
        a.finals[i].alpha != b.finals[i].alpha ||
        a.finals[i].rejected != b.finals[i].rejected)
      return false;
  }
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i].round != b.trace[i].round ||
        a.trace[i].score != b.trace[i].score ||
        !same_result(a.trace[i].result, b.trace[i].result))
      return false;
  }
  return a.cost.bits_per_test == b.cost.bits_per_test &&
         a.cost.total_bits == b.cost.total_bits &&
         a.cost.cost_ratio == b.cost.cost_ratio;
}

}  // namespace adabatt
