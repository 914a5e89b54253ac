#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adabatt/adaptive.hpp"
#include "adabatt/battery.hpp"
#include "adabatt/generators.hpp"

using namespace adabatt;

namespace {

TestDescriptor stub_test(std::string id, double pvalue, std::uint64_t min_length = 1) {
  TestDescriptor d;
  d.id = std::move(id);
  d.min_length = min_length;
  d.pvalue_fn = [pvalue](const BitSequence&) { return pvalue; };
  return d;
}

RoundResult round_entry(int round, std::string id, double pvalue, std::uint64_t n) {
  RoundResult rr;
  rr.round = round;
  rr.result.test_id = std::move(id);
  rr.result.n_bits = n;
  rr.result.pvalue = pvalue;
  rr.result.gamma = gamma_from_pvalue(pvalue, n);
  rr.score = rr.result.gamma;
  return rr;
}

AdaptivePlan small_plan(std::uint64_t m, double alpha, std::size_t s) {
  AdaptivePlan plan;
  plan.alpha = alpha;
  plan.final_length_bits = m;
  plan.final_test_count = 1;
  plan.rounds = {{m / 20, std::max<std::size_t>(1, s / 2)}, {3 * m / 20, 1}};
  if (plan.rounds[0].survivors == 1) plan.rounds.pop_back();
  return plan;
}

}  // namespace

TEST_CASE("cost ratio reproduces the two-round schedule arithmetic") {
  // 25 tests at 5%, 5 at 15%, one final: ratio 25/3
  AdaptivePlan plan;
  plan.final_length_bits = 320000000;  // 40e6 bytes
  plan.rounds = {{16000000, 5}, {48000000, 1}};
  plan.final_test_count = 1;
  const double r = cost_ratio(plan, 25);
  CHECK(r == 25.0 / 3.0);  // exact in double arithmetic
  CHECK(std::fabs(r - 8.333) < 1e-3);

  // degenerate plan: no rounds, final runs the whole battery
  AdaptivePlan flat;
  flat.final_length_bits = 1000;
  flat.rounds = {};
  flat.final_test_count = 25;
  CHECK(cost_ratio(flat, 25) == 1.0);

  // six tests at 5%, three at 15%, one final
  AdaptivePlan six;
  six.final_length_bits = 1000000;
  six.rounds = {{50000, 3}, {150000, 1}};
  six.final_test_count = 1;
  CHECK(cost_ratio(six, 6) == doctest::Approx(6.0 / 1.75).epsilon(1e-12));
  CHECK(cost_ratio(six, 6) > 1.0);
}

TEST_CASE("plan validation") {
  const std::size_t s = 6;
  AdaptivePlan plan = small_plan(100000, 0.01, s);
  validate_plan(plan, s);  // fine

  AdaptivePlan bad = plan;
  bad.rounds = {{5000, 3}, {15000, 3}};  // survivors not strictly decreasing
  CHECK_THROWS_AS(validate_plan(bad, s), std::invalid_argument);

  bad = plan;
  bad.rounds = {{15000, 3}, {5000, 1}};  // lengths decreasing
  CHECK_THROWS_AS(validate_plan(bad, s), std::invalid_argument);

  bad = plan;
  bad.rounds.back().survivors = 2;  // last round must match k
  CHECK_THROWS_AS(validate_plan(bad, s), std::invalid_argument);

  bad = plan;
  bad.final_alphas = {0.0004, 0.0004};  // wrong size and wrong sum
  CHECK_THROWS_AS(validate_plan(bad, s), std::invalid_argument);

  bad = plan;
  bad.rounds.clear();
  bad.final_test_count = 2;  // without rounds the final must run everything
  CHECK_THROWS_AS(validate_plan(bad, s), std::invalid_argument);

  bad = plan;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(validate_plan(bad, s), std::invalid_argument);
}

TEST_CASE("alpha split defaults to equal shares") {
  AdaptivePlan plan;
  plan.alpha = 0.01;
  plan.final_test_count = 4;
  const auto split = final_alpha_split(plan);
  REQUIRE(split.size() == 4);
  for (double a : split) CHECK(a == 0.0025);

  plan.final_alphas = {0.008, 0.002};
  plan.final_test_count = 2;
  CHECK(final_alpha_split(plan) == std::vector<double>{0.008, 0.002});
}

TEST_CASE("preliminary round ranks by gamma") {
  const BitSequence window = uniform_bits(4096, 3);
  std::vector<TestDescriptor> tests = {stub_test("t1", 0.42), stub_test("t13", 0.021)};
  const auto ranked = preliminary_round(tests, window, 1, false);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].result.test_id == "t13");  // smaller p-value ranks first
  CHECK(ranked[0].score > ranked[1].score);

  // all p-values 1: scores tie at zero, battery order is kept
  std::vector<TestDescriptor> flat = {stub_test("a", 1.0), stub_test("b", 1.0),
                                      stub_test("c", 1.0)};
  const auto tied = preliminary_round(flat, window, 1, false);
  CHECK(tied[0].result.test_id == "a");
  CHECK(tied[1].result.test_id == "b");
  CHECK(tied[2].result.test_id == "c");

  // a too-short test is ranked last and reported
  std::vector<TestDescriptor> mixed = {stub_test("small", 0.9),
                                       stub_test("huge", 0.0001, 1u << 30)};
  std::vector<std::string> warnings;
  const auto part = preliminary_round(mixed, window, 2, false, &warnings);
  CHECK(part.back().result.test_id == "huge");
  CHECK_FALSE(std::isfinite(part.back().score));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("huge") != std::string::npos);
}

TEST_CASE("cross-length comparison favors the larger normalized score") {
  // p = 0.028 on the short window beats p = 0.23 on the long one
  const auto short_run = round_entry(1, "t3", 0.028, 16000000);
  const auto long_run = round_entry(2, "t3b", 0.23, 48000000);
  CHECK(short_run.score > long_run.score);
}

TEST_CASE("select_survivors takes the best score over all rounds") {
  std::vector<TestDescriptor> order = {stub_test("t8", 1), stub_test("t13", 1),
                                       stub_test("t21", 1), stub_test("t25", 1)};
  std::vector<RoundResult> rounds;
  // round 1 at l1 = 16e6 bits, round 2 at l2 = 48e6 bits
  rounds.push_back(round_entry(1, "t13", 0.021, 16000000));
  rounds.push_back(round_entry(1, "t8", 0.026, 16000000));
  rounds.push_back(round_entry(1, "t21", 0.047, 16000000));
  rounds.push_back(round_entry(1, "t25", 0.024, 16000000));
  rounds.push_back(round_entry(2, "t13", 0.0028, 48000000));
  rounds.push_back(round_entry(2, "t8", 0.0037, 48000000));
  rounds.push_back(round_entry(2, "t21", 0.73, 48000000));
  rounds.push_back(round_entry(2, "t25", 0.05, 48000000));

  // t13's round-1 score is the global maximum even though round 2 halved it
  const auto top1 = select_survivors(rounds, 1, order);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0] == "t13");

  // m >= candidate count returns everything
  CHECK(select_survivors(rounds, 10, order).size() == 4);

  // identity selection keeps every test
  CHECK(select_survivors(rounds, 4, order).size() == 4);

  // a test whose score does not improve keeps its earlier score
  std::vector<RoundResult> stable = {round_entry(1, "t8", 0.026, 16000000),
                                     round_entry(2, "t8", 0.026 * 3, 48000000)};
  const auto sel = select_survivors(stable, 1, order);
  CHECK(sel[0] == "t8");

  // latest-round rule prefers the most recent score
  std::vector<RoundResult> two = {round_entry(1, "a", 1e-20, 1000),
                                  round_entry(2, "a", 0.9, 2000),
                                  round_entry(1, "b", 0.5, 1000),
                                  round_entry(2, "b", 0.01, 2000)};
  std::vector<TestDescriptor> order2 = {stub_test("a", 1), stub_test("b", 1)};
  CHECK(select_survivors(two, 1, order2, SelectionRule::best_over_rounds)[0] == "a");
  CHECK(select_survivors(two, 1, order2, SelectionRule::latest_round)[0] == "b");
}

TEST_CASE("speed weighting is invariant under common scaling") {
  const BitSequence window = uniform_bits(8192, 9);
  std::vector<TestDescriptor> tests = {stub_test("fast", 0.3), stub_test("slow", 0.1)};
  tests[0].speed_bits_per_sec = 8e9;
  tests[1].speed_bits_per_sec = 1e7;

  const auto ranked = preliminary_round(tests, window, 1, true);
  for (double c : {7.0, 0.125}) {
    auto scaled = tests;
    for (auto& d : scaled) d.speed_bits_per_sec *= c;
    const auto ranked2 = preliminary_round(scaled, window, 1, true);
    REQUIRE(ranked2.size() == ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i)
      CHECK(ranked2[i].result.test_id == ranked[i].result.test_id);
  }
}

TEST_CASE("final stage enforces fresh data") {
  auto battery = default_battery();
  AdaptivePlan plan;
  plan.alpha = 0.001;
  plan.final_length_bits = 100000;
  plan.final_test_count = 1;
  plan.rounds = {{10000, 1}};

  auto src = make_source(GeneratorSpec{Mrg32k3aSpec{}, 5});
  src->seek(10000);  // pretend the preliminary stage consumed [0, 10000)
  const Interval prelim[] = {{0, 10000}};
  std::vector<TestDescriptor> selected = {battery[0]};
  const Verdict ok = final_stage(selected, *src, plan, prelim);
  CHECK(ok.finals.size() == 1);
  CHECK(ok.finals[0].alpha == 0.001);

  // overlapping window: hard error, no verdict
  src->seek(5000);
  CHECK_THROWS_AS(final_stage(selected, *src, plan, prelim), std::runtime_error);

  // selected count must match k
  src->seek(10000);
  std::vector<TestDescriptor> two = {battery[0], battery[1]};
  CHECK_THROWS_AS(final_stage(two, *src, plan, prelim), std::invalid_argument);
}

TEST_CASE("final stage decisions") {
  AdaptivePlan plan;
  plan.alpha = 0.001;
  plan.final_length_bits = 4096;
  plan.final_test_count = 1;

  auto src = make_source(GeneratorSpec{BernoulliSpec{0.5}, 1});
  std::vector<TestDescriptor> tiny_p = {stub_test("t13", 2.9e-26)};
  CHECK(final_stage(tiny_p, *src, plan, {}).reject);

  plan.final_test_count = 2;
  plan.alpha = 0.001;
  plan.final_alphas = {0.0005, 0.0005};
  std::vector<TestDescriptor> both_half = {stub_test("u", 0.5), stub_test("v", 0.5)};
  auto src2 = make_source(GeneratorSpec{BernoulliSpec{0.5}, 2});
  const Verdict accept = final_stage(both_half, *src2, plan, {});
  CHECK_FALSE(accept.reject);
}

TEST_CASE("boundary p-value exactly at alpha rejects") {
  AdaptivePlan plan;
  plan.alpha = 0.05;
  plan.final_length_bits = 1024;
  plan.final_test_count = 1;
  auto src = make_source(GeneratorSpec{BernoulliSpec{0.5}, 3});
  std::vector<TestDescriptor> at_alpha = {stub_test("edge", 0.05)};
  CHECK(final_stage(at_alpha, *src, plan, {}).reject);
}

TEST_CASE("run_adaptive orchestrates rounds, selection, and the final stage") {
  auto battery = default_battery();
  const GeneratorSpec spec{
      MixedSpec{{Mrg32k3aSpec{}, {}}, {LcgSpec{}, {}}, 2}, 42};

  AdaptivePlan plan;
  plan.alpha = 0.001;
  plan.final_length_bits = 400000;
  plan.final_test_count = 1;
  plan.rounds = {{20000, 3}, {60000, 1}};

  auto src = make_source(spec);
  const Verdict v = run_adaptive(plan, battery, *src);

  // trace holds 6 + 3 ranked results, finals exactly one
  CHECK(v.trace.size() == 9);
  REQUIRE(v.finals.size() == 1);
  CHECK(v.finals[0].alpha == 0.001);

  // the source is positioned exactly at prelim end + final length
  CHECK(src->position() == 60000 + 400000);

  // cost ledger: round lengths and final length, by participant
  CHECK(v.cost.total_bits == 6 * 20000 + 3 * 60000 + 400000);
  CHECK(v.cost.cost_ratio == doctest::Approx(cost_ratio(plan, 6)));

  // the defective mixture is caught
  CHECK(v.reject);
}

TEST_CASE("run_adaptive is bit-reproducible") {
  auto battery = default_battery();
  const GeneratorSpec spec{
      MixedSpec{{Mrg32k3aSpec{}, {}}, {LcgSpec{}, {}}, 3}, 1234};
  AdaptivePlan plan;
  plan.alpha = 0.01;
  plan.final_length_bits = 200000;
  plan.final_test_count = 1;
  plan.rounds = {{10000, 3}, {30000, 1}};

  auto s1 = make_source(spec);
  auto s2 = make_source(spec);
  const Verdict a = run_adaptive(plan, battery, *s1);
  const Verdict b = run_adaptive(plan, battery, *s2);
  CHECK(equivalent(a, b));
}

TEST_CASE("degenerate plan reduces to the plain battery") {
  auto battery = default_battery();
  AdaptivePlan plan;
  plan.alpha = 0.01;
  plan.final_length_bits = 65536;
  plan.final_test_count = battery.size();
  plan.rounds = {};

  const GeneratorSpec spec{Mrg32k3aSpec{}, 7};
  auto s1 = make_source(spec);
  const Verdict adaptive = run_adaptive(plan, battery, *s1);

  auto s2 = make_source(spec);
  const BitSequence data = s2->generate(65536);
  const Verdict battery_v = run_battery(battery, data, 0.01);

  CHECK(adaptive.reject == battery_v.reject);
  REQUIRE(adaptive.finals.size() == battery_v.finals.size());
  for (std::size_t i = 0; i < adaptive.finals.size(); ++i) {
    CHECK(adaptive.finals[i].result.test_id == battery_v.finals[i].result.test_id);
    CHECK(adaptive.finals[i].result.pvalue == battery_v.finals[i].result.pvalue);
    CHECK(adaptive.finals[i].alpha == battery_v.finals[i].alpha);
  }
}

TEST_CASE("preliminary data influences selection but not final p-values") {
  auto battery = default_battery();
  AdaptivePlan plan;
  plan.alpha = 0.01;
  plan.final_length_bits = 32768;
  plan.final_test_count = 1;
  plan.rounds = {{8192, 1}};

  // Fix the final window; run the final stage under two different selections.
  auto fresh = [&] {
    auto src = make_source(GeneratorSpec{Mrg32k3aSpec{}, 99});
    src->seek(8192);
    return src;
  };
  for (std::size_t pick : {std::size_t{0}, std::size_t{3}}) {
    auto src = fresh();
    std::vector<TestDescriptor> selected = {battery[pick]};
    const Interval prelim[] = {{0, 8192}};
    const Verdict v = final_stage(selected, *src, plan, prelim);
    // same (test, window) pair gives the same p-value regardless of how
    // the preliminary stage chose it
    auto src2 = fresh();
    const Verdict v2 = final_stage(selected, *src2, plan, prelim);
    CHECK(v.finals[0].result.pvalue == v2.finals[0].result.pvalue);
  }
}

TEST_CASE("budget admission is predictive") {
  auto battery = default_battery();
  calibrate_speed(battery, 1 << 15);

  AdaptivePlan plan;
  plan.alpha = 0.01;
  plan.final_length_bits = 1 << 20;
  plan.final_test_count = 1;
  plan.rounds = {{1 << 15, 3}, {1 << 17, 1}};

  plan.budget_seconds = 1e-12;  // nothing fits in a picosecond
  auto src = make_source(GeneratorSpec{Mrg32k3aSpec{}, 4});
  CHECK_THROWS_AS(run_adaptive(plan, battery, *src), std::runtime_error);

  plan.budget_seconds = 3600.0;
  auto src2 = make_source(GeneratorSpec{Mrg32k3aSpec{}, 4});
  const Verdict v = run_adaptive(plan, battery, *src2);
  CHECK(v.finals.size() == 1);

  // speed weighting without calibration is rejected
  auto uncal = default_battery();
  AdaptivePlan weighted = plan;
  weighted.budget_seconds.reset();
  weighted.use_speed_weighting = true;
  auto src3 = make_source(GeneratorSpec{Mrg32k3aSpec{}, 4});
  CHECK_THROWS_AS(run_adaptive(weighted, uncal, *src3), std::invalid_argument);
}

TEST_CASE("estimate_plan_seconds sums the slowest participants") {
  std::vector<TestDescriptor> tests = {stub_test("a", 0.5), stub_test("b", 0.5)};
  tests[0].speed_bits_per_sec = 1000.0;
  tests[1].speed_bits_per_sec = 500.0;
  AdaptivePlan plan;
  plan.final_length_bits = 1000;
  plan.final_test_count = 1;
  plan.rounds = {{100, 1}};
  // round: both tests on 100 bits; final: slowest single test on 1000 bits
  const double expect = 100.0 * (1.0 / 1000 + 1.0 / 500) + 1000.0 / 500;
  CHECK(estimate_plan_seconds(plan, tests) == doctest::Approx(expect).epsilon(1e-12));
}
