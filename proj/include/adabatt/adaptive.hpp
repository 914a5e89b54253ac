#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adabatt/battery.hpp"
#include "adabatt/generators.hpp"

namespace adabatt {

struct RoundSpec {
  std::uint64_t length_bits = 0;  // prefix length tested in this round
  std::size_t survivors = 0;      // tests kept after this round
};

enum class SelectionRule {
  best_over_rounds,  // a test's score is its maximum over every round it ran
  latest_round,      // only the most recent round counts
};

struct AdaptivePlan {
  std::vector<RoundSpec> rounds;      // lengths non-decreasing, survivors strictly decreasing
  std::uint64_t final_length_bits = 0;
  std::size_t final_test_count = 1;   // k; must equal the last round's survivors
  std::vector<double> final_alphas;   // size k summing to alpha; empty = equal split
  double alpha = 0.001;
  bool use_speed_weighting = false;   // rank by gamma * v instead of gamma
  SelectionRule selection = SelectionRule::best_over_rounds;
  bool fresh_per_round = false;       // default: each round extends the previous prefix
  std::optional<double> budget_seconds;
};

/// Plan mirroring the two-step schedule: all tests on 5% of M, half the
/// battery on 15%, one test on the full length.
AdaptivePlan default_plan(std::uint64_t final_length_bits, double alpha,
                          std::size_t battery_size);

/// Throws std::invalid_argument on any violated plan invariant.
void validate_plan(const AdaptivePlan& plan, std::size_t battery_size);

/// Effective per-test significance levels at the final stage.
std::vector<double> final_alpha_split(const AdaptivePlan& plan);

/// Runs each test on the window and ranks by score, descending; ties and
/// skipped tests keep battery order (skips score -infinity and are
/// reported through *warnings).
std::vector<RoundResult> preliminary_round(
    std::span<const TestDescriptor> tests, const BitSequence& window,
    int round_index, bool speed_weighted,
    std::vector<std::string>* warnings = nullptr);

/// Picks the m test ids with the best score across all completed rounds
/// (or the latest round each test ran in, under SelectionRule::latest_round).
/// battery_order fixes the tie-break. m larger than the candidate set
/// returns everything.
std::vector<std::string> select_survivors(
    std::span<const RoundResult> all_rounds, std::size_t m,
    std::span<const TestDescriptor> battery_order,
    SelectionRule rule = SelectionRule::best_over_rounds);

struct Interval {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // exclusive
};

/// Final stage on fresh data drawn from the source's current position.
/// Throws when the final window would overlap any preliminary window, since
/// the level guarantee rests on that independence.
Verdict final_stage(std::span<const TestDescriptor> selected, BitSource& source,
                    const AdaptivePlan& plan,
                    std::span<const Interval> preliminary_windows);

/// Whole scheme: preliminary rounds, survivor selection, final stage on a
/// fresh window, full trace and cost ledger. When a time budget is set the
/// plan is admitted or rejected up front from calibrated speeds; runs are
/// never interrupted midway.
Verdict run_adaptive(const AdaptivePlan& plan,
                     std::span<const TestDescriptor> battery, BitSource& source);

/// Cost of testing the final length with the full battery, relative to the
/// adaptive schedule, in sequence bits:
/// (s * M) / (sum_r participants_r * n_r + k * M).
double cost_ratio(const AdaptivePlan& plan, std::size_t battery_size);

/// Predicted wall time of the plan from calibrated speeds (worst case over
/// possible survivor sets).
double estimate_plan_seconds(const AdaptivePlan& plan,
                             std::span<const TestDescriptor> battery);

}  // namespace adabatt
