#include "adabatt/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace adabatt {

AdaptivePlan default_plan(std::uint64_t final_length_bits, double alpha,
                          std::size_t battery_size) {
  AdaptivePlan plan;
  plan.alpha = alpha;
  plan.final_length_bits = final_length_bits;
  plan.final_test_count = 1;
  const std::size_t mid = std::max<std::size_t>(1, battery_size / 2);
  plan.rounds = {
      {static_cast<std::uint64_t>(0.05 * static_cast<double>(final_length_bits)), mid},
      {static_cast<std::uint64_t>(0.15 * static_cast<double>(final_length_bits)), 1}};
  return plan;
}

void validate_plan(const AdaptivePlan& plan, std::size_t battery_size) {
  if (battery_size == 0) throw std::invalid_argument("plan: empty battery");
  if (!(plan.alpha > 0.0 && plan.alpha < 1.0))
    throw std::invalid_argument("plan: alpha must be in (0, 1)");
  if (plan.final_length_bits == 0)
    throw std::invalid_argument("plan: final length must be positive");
  if (plan.final_test_count == 0 || plan.final_test_count > battery_size)
    throw std::invalid_argument("plan: final test count must be in [1, battery size]");

  std::size_t prev_survivors = battery_size;
  std::uint64_t prev_length = 0;
  for (const RoundSpec& r : plan.rounds) {
    if (r.length_bits == 0)
      throw std::invalid_argument("plan: round length must be positive");
    if (r.length_bits < prev_length)
      throw std::invalid_argument("plan: round lengths must be non-decreasing");
    if (r.survivors == 0 || r.survivors >= prev_survivors)
      throw std::invalid_argument("plan: survivors must strictly decrease");
    prev_survivors = r.survivors;
    prev_length = r.length_bits;
  }
  if (!plan.rounds.empty() &&
      plan.rounds.back().survivors != plan.final_test_count)
    throw std::invalid_argument(
        "plan: last round survivors must equal the final test count");
  if (plan.rounds.empty() && plan.final_test_count != battery_size)
    throw std::invalid_argument(
        "plan: without rounds the final stage must run the whole battery");

  if (!plan.final_alphas.empty()) {
    if (plan.final_alphas.size() != plan.final_test_count)
      throw std::invalid_argument("plan: alpha split size must equal k");
    double sum = 0.0;
    for (double a : plan.final_alphas) {
      if (!(a > 0.0)) throw std::invalid_argument("plan: alpha split entries must be > 0");
      sum += a;
    }
    if (std::fabs(sum - plan.alpha) > 1e-12 * plan.alpha)
      throw std::invalid_argument("plan: alpha split does not sum to alpha");
  }
}

std::vector<double> final_alpha_split(const AdaptivePlan& plan) {
  if (!plan.final_alphas.empty()) return plan.final_alphas;
  return std::vector<double>(plan.final_test_count,
                             plan.alpha / static_cast<double>(plan.final_test_count));
}

std::vector<RoundResult> preliminary_round(
    std::span<const TestDescriptor> tests, const BitSequence& window,
    int round_index, bool speed_weighted, std::vector<std::string>* warnings) {
  std::vector<RoundResult> results;
  results.reserve(tests.size());
  for (const TestDescriptor& desc : tests) {
    RoundResult rr;
    rr.round = round_index;
    if (window.size() < desc.min_length) {
      if (warnings)
        warnings->push_back("round " + std::to_string(round_index) +
                            ": skipped '" + desc.id + "': needs " +
                            std::to_string(desc.min_length) + " bits, got " +
                            std::to_string(window.size()));
      rr.result.test_id = desc.id;
      rr.result.n_bits = 0;  // nothing was tested
      rr.score = -std::numeric_limits<double>::infinity();
    } else {
      rr.result = run_test(desc, window);
      rr.score = speed_weighted ? rr.result.gamma * desc.speed_bits_per_sec
                                : rr.result.gamma;
    }
    results.push_back(std::move(rr));
  }
  // Descending by score; battery order breaks ties deterministically.
  std::stable_sort(results.begin(), results.end(),
                   [](const RoundResult& a, const RoundResult& b) {
                     return a.score > b.score;
                   });
  return results;
}

std::vector<std::string> select_survivors(
    std::span<const RoundResult> all_rounds, std::size_t m,
    std::span<const TestDescriptor> battery_order, SelectionRule rule) {
  if (m == 0) throw std::invalid_argument("select_survivors: m must be >= 1");
  struct Entry {
    double score = -std::numeric_limits<double>::infinity();
    int round = 0;
    bool seen = false;
  };
  std::map<std::string, Entry> by_id;
  for (const RoundResult& rr : all_rounds) {
    Entry& e = by_id[rr.result.test_id];
    const bool replace = !e.seen ||
                         (rule == SelectionRule::best_over_rounds
                              ? rr.score > e.score
                              : rr.round > e.round ||
                                    (rr.round == e.round && rr.score > e.score));
    if (replace) e = {rr.score, rr.round, true};
  }

  // Candidates in battery order so equal scores rank deterministically.
  std::vector<std::pair<std::string, double>> candidates;
  for (const TestDescriptor& d : battery_order) {
    auto it = by_id.find(d.id);
    if (it != by_id.end()) candidates.emplace_back(d.id, it->second.score);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (candidates.size() > m) candidates.resize(m);
  std::vector<std::string> ids;
  ids.reserve(candidates.size());
  for (auto& [id, score] : candidates) ids.push_back(std::move(id));
  return ids;
}

Verdict final_stage(std::span<const TestDescriptor> selected, BitSource& source,
                    const AdaptivePlan& plan,
                    std::span<const Interval> preliminary_windows) {
  if (selected.size() != plan.final_test_count)
    throw std::invalid_argument("final_stage: selected test count must equal k");
  const Interval fin{source.position(), source.position() + plan.final_length_bits};
  for (const Interval& w : preliminary_windows) {
    if (fin.begin < w.end && w.begin < fin.end)
      throw std::runtime_error(
          "final_stage: final window overlaps preliminary data; the level "
          "guarantee requires fresh data");
  }
  const BitSequence data = source.generate(plan.final_length_bits);
  const std::vector<double> alphas = final_alpha_split(plan);

  Verdict v;
  for (std::size_t j = 0; j < selected.size(); ++j) {
    FinalEntry e;
    e.result = run_test(selected[j], data);
    e.alpha = alphas[j];
    e.rejected = e.result.pvalue <= alphas[j];
    v.reject = v.reject || e.rejected;
    v.finals.push_back(std::move(e));
  }
  return v;
}

double cost_ratio(const AdaptivePlan& plan, std::size_t battery_size) {
  const double m = static_cast<double>(plan.final_length_bits);
  double cost = static_cast<double>(plan.final_test_count) * m;
  std::size_t participants = battery_size;
  for (const RoundSpec& r : plan.rounds) {
    cost += static_cast<double>(participants) * static_cast<double>(r.length_bits);
    participants = r.survivors;
  }
  return static_cast<double>(battery_size) * m / cost;
}

double estimate_plan_seconds(const AdaptivePlan& plan,
                             std::span<const TestDescriptor> battery) {
  std::vector<double> inv_v;
  inv_v.reserve(battery.size());
  for (const TestDescriptor& d : battery) {
    if (!(d.speed_bits_per_sec > 0.0))
      throw std::invalid_argument("estimate_plan_seconds: '" + d.id +
                                  "' has no calibrated speed");
    inv_v.push_back(1.0 / d.speed_bits_per_sec);
  }
  std::sort(inv_v.begin(), inv_v.end(), std::greater<>());  // slowest first
  auto slowest_sum = [&](std::size_t count) {
    double s = 0.0;
    for (std::size_t i = 0; i < count && i < inv_v.size(); ++i) s += inv_v[i];
    return s;
  };
  double t = 0.0;
  std::size_t participants = battery.size();
  for (const RoundSpec& r : plan.rounds) {
    t += static_cast<double>(r.length_bits) * slowest_sum(participants);
    participants = r.survivors;
  }
  t += static_cast<double>(plan.final_length_bits) *
       slowest_sum(plan.final_test_count);
  return t;
}

Verdict run_adaptive(const AdaptivePlan& plan,
                     std::span<const TestDescriptor> battery, BitSource& source) {
  validate_plan(plan, battery.size());
  if (plan.use_speed_weighting) {
    for (const TestDescriptor& d : battery)
      if (!(d.speed_bits_per_sec > 0.0))
        throw std::invalid_argument(
            "run_adaptive: speed weighting requires calibrated speeds");
  }
  if (plan.budget_seconds) {
    const double est = estimate_plan_seconds(plan, battery);
    if (est > *plan.budget_seconds)
      throw std::runtime_error("run_adaptive: plan rejected, estimated " +
                               std::to_string(est) + " s exceeds budget of " +
                               std::to_string(*plan.budget_seconds) + " s");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t origin = source.position();

  Verdict verdict;
  std::vector<RoundResult> all_rounds;
  std::vector<Interval> windows;
  std::map<std::string, std::uint64_t> bits_per_test;

  // Participants of round 1 are the whole battery.
  std::vector<TestDescriptor> active(battery.begin(), battery.end());

  BitWriter prefix;  // grows across rounds unless fresh_per_round
  for (std::size_t r = 0; r < plan.rounds.size(); ++r) {
    const RoundSpec& spec = plan.rounds[r];
    BitSequence window;
    if (plan.fresh_per_round) {
      const std::uint64_t begin = source.position();
      window = source.generate(spec.length_bits);
      windows.push_back({begin, begin + spec.length_bits});
    } else {
      // The round-j sequence is a prefix extension of round j-1.
      if (spec.length_bits > prefix.size()) {
        const BitSequence delta = source.generate(spec.length_bits - prefix.size());
        prefix.append(delta);
      }
      window = prefix.snapshot();
      if (windows.empty())
        windows.push_back({origin, origin + spec.length_bits});
      else
        windows[0].end = std::max(windows[0].end, origin + spec.length_bits);
    }

    auto results = preliminary_round(active, window, static_cast<int>(r) + 1,
                                     plan.use_speed_weighting, &verdict.warnings);
    for (const RoundResult& rr : results)
      bits_per_test[rr.result.test_id] += rr.result.n_bits;
    all_rounds.insert(all_rounds.end(), results.begin(), results.end());

    const auto ids = select_survivors(all_rounds, spec.survivors, battery,
                                      plan.selection);
    active.clear();
    for (const TestDescriptor& d : battery)
      if (std::find(ids.begin(), ids.end(), d.id) != ids.end())
        active.push_back(d);
  }

  // Final participants: re-select from everything when rounds exist,
  // otherwise the full battery (k == s was validated).
  std::vector<TestDescriptor> selected;
  if (plan.rounds.empty()) {
    selected = std::vector<TestDescriptor>(battery.begin(), battery.end());
  } else {
    const auto ids = select_survivors(all_rounds, plan.final_test_count, battery,
                                      plan.selection);
    for (const TestDescriptor& d : battery)
      if (std::find(ids.begin(), ids.end(), d.id) != ids.end())
        selected.push_back(d);
  }

  Verdict fin = final_stage(selected, source, plan, windows);
  verdict.reject = fin.reject;
  verdict.finals = std::move(fin.finals);
  verdict.trace = std::move(all_rounds);
  for (const FinalEntry& e : verdict.finals)
    bits_per_test[e.result.test_id] += e.result.n_bits;

  for (const TestDescriptor& d : battery) {
    auto it = bits_per_test.find(d.id);
    if (it != bits_per_test.end())
      verdict.cost.bits_per_test.emplace_back(d.id, it->second);
  }
  for (const auto& [id, bits] : verdict.cost.bits_per_test)
    verdict.cost.total_bits += bits;
  verdict.cost.cost_ratio = cost_ratio(plan, battery.size());
  verdict.cost.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return verdict;
}

}  // namespace adabatt
