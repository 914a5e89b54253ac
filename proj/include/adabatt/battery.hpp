#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adabatt/bitstream.hpp"

namespace adabatt {

/// p-values are clamped here before computing gamma, so gamma is always
/// finite; below this floor every test is maximally significant anyway.
inline constexpr double kPvalueFloor = 1e-300;

struct TestResult {
  std::string test_id;
  std::uint64_t n_bits = 0;
  double pvalue = 1.0;
  double gamma = 0.0;    // -log2(pvalue) / n_bits
  double seconds = 0.0;  // elapsed wall time; measurement metadata, not content
};

/// gamma = -log2(clamped p) / n; 0 iff p == 1.
double gamma_from_pvalue(double pvalue, std::uint64_t n_bits);

struct TestDescriptor {
  std::string id;
  std::uint64_t min_length = 1;          // smallest accepted n in bits
  double speed_bits_per_sec = 0.0;       // filled by calibrate_speed
  std::function<double(const BitSequence&)> pvalue_fn;
};

struct BatteryParams {
  std::uint32_t block_size = 128;   // block frequency test
  std::vector<int> kt_orders = {1}; // one compression test per order
};

// --------------------------------------------------------------------------
// Verdicts (shared by run_battery and the adaptive scheduler)
// --------------------------------------------------------------------------

struct FinalEntry {
  TestResult result;
  double alpha = 0.0;
  bool rejected = false;  // result.pvalue <= alpha
};

struct RoundResult {
  int round = 0;       // 1-based preliminary round index
  double score = 0.0;  // gamma, or gamma-hat when speed weighting is on
  TestResult result;
};

struct CostLedger {
  std::vector<std::pair<std::string, std::uint64_t>> bits_per_test;
  std::uint64_t total_bits = 0;
  double cost_ratio = 1.0;  // full-battery cost over actual cost
  double wall_seconds = 0.0;
};

struct Verdict {
  bool reject = false;  // reject iff any final entry rejected
  std::vector<FinalEntry> finals;
  std::vector<RoundResult> trace;  // preliminary rounds, empty for plain batteries
  CostLedger cost;
  std::vector<std::string> warnings;
};

/// Equality over statistical content; elapsed-time fields are ignored.
bool equivalent(const Verdict& a, const Verdict& b);

// --------------------------------------------------------------------------
// Raw statistics (p-value per test; inputs already length-checked)
// --------------------------------------------------------------------------

namespace stats {
double monobit_pvalue(const BitSequence& x);
double block_frequency_pvalue(const BitSequence& x, std::uint32_t block_bits);
double runs_pvalue(const BitSequence& x);
double serial2_pvalue(const BitSequence& x);
double cusum_forward_pvalue(const BitSequence& x);
}  // namespace stats

// --------------------------------------------------------------------------
// Battery assembly and execution
// --------------------------------------------------------------------------

/// Registry of test factories keyed by a base id; a factory may expand to
/// several descriptors (compression emits one per configured order).
class TestRegistry {
 public:
  using Factory =
      std::function<std::vector<TestDescriptor>(const BatteryParams&)>;

  static TestRegistry& instance();

  void add(const std::string& id, Factory factory);
  bool contains(const std::string& id) const;
  std::vector<TestDescriptor> make(const std::string& id,
                                   const BatteryParams& params) const;
  std::vector<std::string> ids() const;  // registration order

 private:
  TestRegistry();
  std::vector<std::pair<std::string, Factory>> factories_;
};

/// The six built-in tests in canonical order: monobit, block_frequency,
/// runs, serial2, cusum, compression.k<order> for each configured order.
std::vector<TestDescriptor> default_battery(const BatteryParams& params = {});

std::vector<TestDescriptor> make_battery(std::span<const std::string> ids,
                                         const BatteryParams& params);

/// Runs one test; throws std::invalid_argument when x is shorter than the
/// descriptor's min_length. Deterministic given (descriptor, x).
TestResult run_test(const TestDescriptor& desc, const BitSequence& x);

/// Applies every test at level alpha_total / battery size and rejects when
/// any member rejects. Tests the sequence is too short for are skipped with
/// a recorded warning.
Verdict run_battery(std::span<const TestDescriptor> battery,
                    const BitSequence& x, double alpha_total);

/// Measures throughput of each test on a uniform probe sequence and fills
/// speed_bits_per_sec.
void calibrate_speed(std::span<TestDescriptor> battery,
                     std::uint64_t probe_length, std::uint64_t seed = 0xca11b);

/// Uniform bits from a dedicated driver generator (not itself under test).
BitSequence uniform_bits(std::uint64_t n_bits, std::uint64_t seed);

}  // namespace adabatt
