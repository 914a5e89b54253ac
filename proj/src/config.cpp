#include "adabatt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace adabatt {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

struct RawConfig {
  // section -> key -> value; top-level keys live under "".
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }
  const std::string& get(const std::string& sec, const std::string& key) const {
    return sections.at(sec).at(key);
  }
};

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    auto& sec = raw.sections[section];
    if (sec.count(key))
      throw ConfigError("duplicate key '" + key + "' in section [" + section + "]");
    sec[key] = value;
  }
  return raw;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"", {"mode", "alpha", "seed", "length", "probe_length"}},
    {"source",
     {"kind", "seed", "p", "row0", "row1", "modulus", "multiplier", "increment",
      "d", "path"}},
    {"source.good",
     {"kind", "seed", "p", "row0", "row1", "modulus", "multiplier", "increment"}},
    {"source.bad",
     {"kind", "seed", "p", "row0", "row1", "modulus", "multiplier", "increment"}},
    {"plan",
     {"rounds", "final_length", "final_tests", "alpha_split", "speed_weighting",
      "selection", "fresh_per_round", "budget_seconds"}},
    {"battery", {"tests", "block_size", "kt_orders"}},
    {"verify", {"arm", "kt_order", "n_grid", "seeds", "tolerance"}},
    {"output", {"format", "path", "dump_bits"}},
};

void check_keys(const RawConfig& raw) {
  for (const auto& [section, keys] : raw.sections) {
    auto allowed = kAllowedKeys.find(section);
    if (allowed == kAllowedKeys.end())
      throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!allowed->second.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  }
}

SimpleKind parse_simple_kind(const RawConfig& raw, const std::string& sec) {
  const std::string kind = raw.has(sec, "kind") ? raw.get(sec, "kind") : "";
  if (kind.empty())
    throw ConfigError("section [" + sec + "]: missing key 'kind'");
  if (kind == "mrg32k3a") return Mrg32k3aSpec{};
  if (kind == "lcg") {
    LcgSpec lcg;
    if (raw.has(sec, "modulus")) lcg.modulus = parse_u64("modulus", raw.get(sec, "modulus"));
    if (raw.has(sec, "multiplier"))
      lcg.multiplier = parse_u64("multiplier", raw.get(sec, "multiplier"));
    if (raw.has(sec, "increment"))
      lcg.increment = parse_u64("increment", raw.get(sec, "increment"));
    return lcg;
  }
  if (kind == "bernoulli") {
    BernoulliSpec b;
    if (raw.has(sec, "p")) b.p = parse_double("p", raw.get(sec, "p"));
    return b;
  }
  if (kind == "markov") {
    MarkovSpec m;
    for (int r = 0; r < 2; ++r) {
      const std::string key = "row" + std::to_string(r);
      if (!raw.has(sec, key))
        throw ConfigError("section [" + sec + "]: markov requires key '" + key + "'");
      const auto parts = split(raw.get(sec, key), ',');
      if (parts.size() != 2)
        throw ConfigError("key '" + key + "': expected two comma-separated numbers");
      m.transition[r][0] = parse_double(key, parts[0]);
      m.transition[r][1] = parse_double(key, parts[1]);
    }
    return m;
  }
  throw ConfigError("section [" + sec + "]: unknown generator kind '" + kind + "'");
}

void parse_source(const RawConfig& raw, RunConfig& cfg) {
  if (!raw.sections.count("source"))
    throw ConfigError("missing [source] section");
  const std::string kind =
      raw.has("source", "kind") ? raw.get("source", "kind") : "";
  if (kind.empty()) throw ConfigError("section [source]: missing key 'kind'");

  if (kind == "file") {
    if (!raw.has("source", "path"))
      throw ConfigError("section [source]: file source requires key 'path'");
    cfg.input_file = raw.get("source", "path");
    return;
  }

  GeneratorSpec spec;
  spec.seed = cfg.seed;
  if (raw.has("source", "seed")) spec.seed = parse_u64("seed", raw.get("source", "seed"));

  if (kind == "mixed") {
    MixedSpec mixed;
    if (raw.has("source", "d")) mixed.d = parse_u64("d", raw.get("source", "d"));
    for (const char* which : {"good", "bad"}) {
      const std::string sec = std::string("source.") + which;
      if (!raw.sections.count(sec))
        throw ConfigError("mixed source requires section [" + sec + "]");
      SimpleSpec inner;
      inner.kind = parse_simple_kind(raw, sec);
      if (raw.has(sec, "seed"))
        inner.seed = parse_u64("seed", raw.get(sec, "seed"));
      (std::string(which) == "good" ? mixed.good : mixed.bad) = inner;
    }
    spec.kind = mixed;
  } else {
    SimpleKind simple = parse_simple_kind(raw, "source");
    std::visit([&](auto k) { spec.kind = k; }, simple);
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section [source]: ") + e.what());
  }
  cfg.source = spec;
}

void parse_plan(const RawConfig& raw, RunConfig& cfg, std::size_t battery_size) {
  AdaptivePlan plan = default_plan(1000000, cfg.alpha, battery_size);
  plan.alpha = cfg.alpha;

  const bool has_section = raw.sections.count("plan") > 0;
  if (has_section && raw.has("plan", "final_length"))
    plan.final_length_bits = parse_u64("final_length", raw.get("plan", "final_length"));

  // Default rounds scale with the configured final length.
  plan = default_plan(plan.final_length_bits, cfg.alpha, battery_size);

  if (has_section) {
    if (raw.has("plan", "final_tests"))
      plan.final_test_count = parse_u64("final_tests", raw.get("plan", "final_tests"));
    if (raw.has("plan", "rounds")) {
      plan.rounds.clear();
      for (const std::string& part : split(raw.get("plan", "rounds"), ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos)
          throw ConfigError("key 'rounds': expected <length>:<survivors> entries");
        const std::string len_s = trim(part.substr(0, colon));
        const std::string surv_s = trim(part.substr(colon + 1));
        RoundSpec r;
        const double len = parse_double("rounds", len_s);
        if (len <= 0.0) throw ConfigError("key 'rounds': lengths must be positive");
        // Values below 1 are fractions of the final length.
        r.length_bits = len < 1.0
                            ? static_cast<std::uint64_t>(
                                  std::llround(len * static_cast<double>(
                                                         plan.final_length_bits)))
                            : parse_u64("rounds", len_s);
        r.survivors = parse_u64("rounds", surv_s);
        plan.rounds.push_back(r);
      }
    }
    if (raw.has("plan", "alpha_split")) {
      plan.final_alphas.clear();
      for (const std::string& part : split(raw.get("plan", "alpha_split"), ','))
        plan.final_alphas.push_back(parse_double("alpha_split", part));
    }
    if (raw.has("plan", "speed_weighting"))
      plan.use_speed_weighting =
          parse_bool("speed_weighting", raw.get("plan", "speed_weighting"));
    if (raw.has("plan", "selection")) {
      const std::string sel = raw.get("plan", "selection");
      if (sel == "best")
        plan.selection = SelectionRule::best_over_rounds;
      else if (sel == "latest")
        plan.selection = SelectionRule::latest_round;
      else
        throw ConfigError("key 'selection': expected 'best' or 'latest'");
    }
    if (raw.has("plan", "fresh_per_round"))
      plan.fresh_per_round =
          parse_bool("fresh_per_round", raw.get("plan", "fresh_per_round"));
    if (raw.has("plan", "budget_seconds"))
      plan.budget_seconds = parse_double("budget_seconds", raw.get("plan", "budget_seconds"));
  }

  try {
    validate_plan(plan, battery_size);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section [plan]: ") + e.what());
  }
  cfg.plan = plan;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::battery: return "battery";
    case RunMode::adaptive: return "adaptive";
    case RunMode::verify_theorem: return "verify-theorem";
    case RunMode::calibrate: return "calibrate";
  }
  return "?";
}

RunMode mode_from_string(const std::string& s) {
  if (s == "battery") return RunMode::battery;
  if (s == "adaptive") return RunMode::adaptive;
  if (s == "verify-theorem") return RunMode::verify_theorem;
  if (s == "calibrate") return RunMode::calibrate;
  throw ConfigError("key 'mode': unknown mode '" + s + "'");
}

ReportFormat format_from_string(const std::string& s) {
  if (s == "human") return ReportFormat::human;
  if (s == "json") return ReportFormat::json;
  if (s == "tsv") return ReportFormat::tsv;
  throw ConfigError("key 'format': unknown format '" + s + "'");
}

RunConfig parse_config(const std::string& text) {
  const RawConfig raw = parse_raw(text);
  check_keys(raw);

  RunConfig cfg;
  if (!raw.has("", "mode")) throw ConfigError("missing required key 'mode'");
  cfg.mode = mode_from_string(raw.get("", "mode"));
  if (raw.has("", "alpha")) cfg.alpha = parse_double("alpha", raw.get("", "alpha"));
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw ConfigError("key 'alpha': must be in (0, 1)");
  if (raw.has("", "seed")) cfg.seed = parse_u64("seed", raw.get("", "seed"));
  if (raw.has("", "length")) cfg.length_bits = parse_u64("length", raw.get("", "length"));
  if (raw.has("", "probe_length"))
    cfg.probe_length = parse_u64("probe_length", raw.get("", "probe_length"));

  // Battery membership and parameters.
  cfg.tests = {"monobit", "block_frequency", "runs", "serial2", "cusum",
               "compression"};
  if (raw.sections.count("battery")) {
    if (raw.has("battery", "tests")) {
      cfg.tests = split(raw.get("battery", "tests"), ',');
      if (cfg.tests.empty() || (cfg.tests.size() == 1 && cfg.tests[0].empty()))
        throw ConfigError("key 'tests': battery cannot be empty");
      for (const std::string& id : cfg.tests)
        if (!TestRegistry::instance().contains(id))
          throw ConfigError("key 'tests': unknown test id '" + id + "'");
    }
    if (raw.has("battery", "block_size")) {
      const std::uint64_t m = parse_u64("block_size", raw.get("battery", "block_size"));
      if (m == 0 || m > (1u << 20))
        throw ConfigError("key 'block_size': must be in [1, 2^20]");
      cfg.battery_params.block_size = static_cast<std::uint32_t>(m);
    }
    if (raw.has("battery", "kt_orders")) {
      cfg.battery_params.kt_orders.clear();
      for (const std::string& part : split(raw.get("battery", "kt_orders"), ',')) {
        const std::uint64_t k = parse_u64("kt_orders", part);
        if (k > 16) throw ConfigError("key 'kt_orders': orders must be <= 16");
        cfg.battery_params.kt_orders.push_back(static_cast<int>(k));
      }
    }
  }

  // Calibration needs no data source; every other mode does.
  if (cfg.mode != RunMode::calibrate || raw.sections.count("source"))
    parse_source(raw, cfg);

  if (cfg.mode == RunMode::verify_theorem) {
    if (raw.sections.count("verify")) {
      if (raw.has("verify", "arm")) {
        cfg.verify.arm = raw.get("verify", "arm");
        if (cfg.verify.arm != "np" && cfg.verify.arm != "compression")
          throw ConfigError("key 'arm': expected 'np' or 'compression'");
      }
      if (raw.has("verify", "kt_order"))
        cfg.verify.kt_order =
            static_cast<int>(parse_u64("kt_order", raw.get("verify", "kt_order")));
      if (raw.has("verify", "n_grid")) {
        cfg.verify.n_grid.clear();
        for (const std::string& part : split(raw.get("verify", "n_grid"), ','))
          cfg.verify.n_grid.push_back(parse_u64("n_grid", part));
        if (cfg.verify.n_grid.empty())
          throw ConfigError("key 'n_grid': cannot be empty");
      }
      if (raw.has("verify", "seeds"))
        cfg.verify.seeds = static_cast<int>(parse_u64("seeds", raw.get("verify", "seeds")));
      if (raw.has("verify", "tolerance"))
        cfg.verify.tolerance = parse_double("tolerance", raw.get("verify", "tolerance"));
    }
    if (!cfg.source || cfg.input_file)
      throw ConfigError("verify-theorem mode requires a bernoulli or markov [source]");
    const bool ok = std::holds_alternative<BernoulliSpec>(cfg.source->kind) ||
                    std::holds_alternative<MarkovSpec>(cfg.source->kind);
    if (!ok)
      throw ConfigError(
          "verify-theorem mode requires a bernoulli or markov [source]");
  }

  if (cfg.mode == RunMode::adaptive) {
    const std::size_t battery_size =
        make_battery(cfg.tests, cfg.battery_params).size();
    parse_plan(raw, cfg, battery_size);
  }

  if (raw.sections.count("output")) {
    if (raw.has("output", "format"))
      cfg.format = format_from_string(raw.get("output", "format"));
    if (raw.has("output", "path")) cfg.out_path = raw.get("output", "path");
    if (raw.has("output", "dump_bits")) cfg.dump_bits = raw.get("output", "dump_bits");
  }
  return cfg;
}

}  // namespace adabatt
