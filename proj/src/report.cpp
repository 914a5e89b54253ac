#include "adabatt/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace adabatt {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

double bytes_of(std::uint64_t bits) { return static_cast<double>(bits) / 8.0; }

std::string format_length_bytes(std::uint64_t bits) {
  const double b = bytes_of(bits);
  if (b == std::floor(b)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", b);
    return buf;
  }
  return fmt("%.1f", b);
}

ordered_json result_json(const TestResult& r) {
  ordered_json j;
  j["test"] = r.test_id;
  j["n_bits"] = r.n_bits;
  j["n_bytes"] = bytes_of(r.n_bits);
  j["pvalue"] = r.pvalue;
  j["gamma"] = r.gamma;
  j["gamma_per_byte"] = r.gamma * 8.0;
  return j;
}

TestResult result_from_json(const ordered_json& j) {
  TestResult r;
  r.test_id = j.at("test").get<std::string>();
  r.n_bits = j.at("n_bits").get<std::uint64_t>();
  r.pvalue = j.at("pvalue").get<double>();
  r.gamma = j.at("gamma").get<double>();
  return r;
}

ordered_json meta_json(const ReportMeta& meta) {
  ordered_json j;
  j["tool"] = "adabatt";
  j["mode"] = meta.mode;
  j["alpha"] = meta.alpha;
  j["seed"] = meta.seed;
  j["source"] = meta.source;
  return j;
}

ordered_json verdict_json(const Verdict& v, const ReportMeta& meta) {
  ordered_json j = meta_json(meta);
  j["decision"] = v.reject ? "reject" : "accept";

  ordered_json rounds = ordered_json::array();
  for (const RoundResult& rr : v.trace) {
    ordered_json e = result_json(rr.result);
    e["round"] = rr.round;
    e["score"] = std::isfinite(rr.score) ? ordered_json(rr.score)
                                         : ordered_json("skipped");
    rounds.push_back(std::move(e));
  }
  j["preliminary"] = std::move(rounds);

  ordered_json finals = ordered_json::array();
  for (const FinalEntry& e : v.finals) {
    ordered_json f = result_json(e.result);
    f["alpha"] = e.alpha;
    f["rejected"] = e.rejected;
    finals.push_back(std::move(f));
  }
  j["final"] = std::move(finals);

  ordered_json cost;
  ordered_json per_test = ordered_json::array();
  for (const auto& [id, bits] : v.cost.bits_per_test) {
    ordered_json e;
    e["test"] = id;
    e["bits"] = bits;
    per_test.push_back(std::move(e));
  }
  cost["bits_per_test"] = std::move(per_test);
  cost["total_bits"] = v.cost.total_bits;
  cost["cost_ratio"] = v.cost.cost_ratio;
  j["cost"] = std::move(cost);
  j["warnings"] = v.warnings;
  return j;
}

std::string render_verdict_human(const Verdict& v, const ReportMeta& meta) {
  std::ostringstream os;
  os << "Time-adaptive testing (adabatt)\n";
  os << "mode=" << meta.mode << "  alpha=" << fmt("%.6g", meta.alpha)
     << "  seed=" << meta.seed << "\n";
  os << "source: " << meta.source << "\n\n";

  if (!v.trace.empty()) {
    os << "Preliminary stage\n";
    int current_round = 0;
    for (const RoundResult& rr : v.trace) {
      if (rr.round != current_round) {
        current_round = rr.round;
        os << "round " << current_round << "\n";
        os << "  test                length(bytes)  p-value   -log2(pi)/l per byte\n";
      }
      char line[160];
      if (std::isfinite(rr.score)) {
        std::snprintf(line, sizeof(line), "  %-18s  %-13s  %-8s  %s\n",
                      rr.result.test_id.c_str(),
                      format_length_bytes(rr.result.n_bits).c_str(),
                      format_pvalue(rr.result.pvalue).c_str(),
                      format_gamma_per_byte(rr.result.gamma).c_str());
      } else {
        std::snprintf(line, sizeof(line), "  %-18s  skipped\n",
                      rr.result.test_id.c_str());
      }
      os << line;
    }
    os << "\n";
  }

  os << "Final stage\n";
  os << "  test                length(bytes)  alpha_j   p-value   result\n";
  for (const FinalEntry& e : v.finals) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %-18s  %-13s  %-8s  %-8s  %s\n",
                  e.result.test_id.c_str(),
                  format_length_bytes(e.result.n_bits).c_str(),
                  format_pvalue(e.alpha).c_str(),
                  format_pvalue(e.result.pvalue).c_str(),
                  e.rejected ? "reject" : "pass");
    os << line;
  }
  os << "\nCost\n";
  for (const auto& [id, bits] : v.cost.bits_per_test)
    os << "  " << id << ": " << bits << " bits\n";
  os << "  total bits tested: " << v.cost.total_bits << "\n";
  os << "  cost ratio (full battery / adaptive): " << fmt("%.6g", v.cost.cost_ratio)
     << "\n";
  for (const std::string& w : v.warnings) os << "warning: " << w << "\n";
  os << "\nDecision: H0 " << (v.reject ? "rejected" : "accepted") << "\n";
  return os.str();
}

std::string render_verdict_tsv(const Verdict& v, const ReportMeta& meta) {
  std::ostringstream os;
  os << "section\tround\ttest\tn_bits\tpvalue\tgamma\talpha\trejected\n";
  char line[256];
  for (const RoundResult& rr : v.trace) {
    std::snprintf(line, sizeof(line), "prelim\t%d\t%s\t%llu\t%.17g\t%.17g\t\t%s\n",
                  rr.round, rr.result.test_id.c_str(),
                  static_cast<unsigned long long>(rr.result.n_bits),
                  rr.result.pvalue, rr.result.gamma,
                  std::isfinite(rr.score) ? "" : "skipped");
    os << line;
  }
  for (const FinalEntry& e : v.finals) {
    std::snprintf(line, sizeof(line), "final\t\t%s\t%llu\t%.17g\t%.17g\t%.17g\t%d\n",
                  e.result.test_id.c_str(),
                  static_cast<unsigned long long>(e.result.n_bits),
                  e.result.pvalue, e.result.gamma, e.alpha, e.rejected ? 1 : 0);
    os << line;
  }
  std::snprintf(line, sizeof(line), "cost\t\ttotal\t%llu\t\t\t\t\n",
                static_cast<unsigned long long>(v.cost.total_bits));
  os << line;
  std::snprintf(line, sizeof(line), "cost\t\tratio\t\t%.17g\t\t\t\n",
                v.cost.cost_ratio);
  os << line;
  os << "decision\t\t" << (v.reject ? "reject" : "accept") << "\t\t\t\t\t\n";
  return os.str();
}

}  // namespace

std::string format_pvalue(double p) {
  return fmt("%.1e", p);
}

std::string format_gamma_per_byte(double gamma_per_bit) {
  const double a = gamma_per_bit * 8.0 / 1e-7;
  return fmt("%.2g", a) + " 10^-7";
}

std::string render_verdict(const Verdict& v, const ReportMeta& meta,
                           ReportFormat format) {
  switch (format) {
    case ReportFormat::human: return render_verdict_human(v, meta);
    case ReportFormat::json: return verdict_to_json(v, meta);
    case ReportFormat::tsv: return render_verdict_tsv(v, meta);
  }
  return "";
}

std::string verdict_to_json(const Verdict& v, const ReportMeta& meta) {
  return verdict_json(v, meta).dump(2) + "\n";
}

Verdict verdict_from_json(const std::string& json_text) {
  const ordered_json j = ordered_json::parse(json_text);
  Verdict v;
  v.reject = j.at("decision").get<std::string>() == "reject";
  for (const auto& e : j.at("preliminary")) {
    RoundResult rr;
    rr.round = e.at("round").get<int>();
    rr.result = result_from_json(e);
    rr.score = e.at("score").is_string()
                   ? -std::numeric_limits<double>::infinity()
                   : e.at("score").get<double>();
    v.trace.push_back(std::move(rr));
  }
  for (const auto& e : j.at("final")) {
    FinalEntry f;
    f.result = result_from_json(e);
    f.alpha = e.at("alpha").get<double>();
    f.rejected = e.at("rejected").get<bool>();
    v.finals.push_back(std::move(f));
  }
  for (const auto& e : j.at("cost").at("bits_per_test"))
    v.cost.bits_per_test.emplace_back(e.at("test").get<std::string>(),
                                      e.at("bits").get<std::uint64_t>());
  v.cost.total_bits = j.at("cost").at("total_bits").get<std::uint64_t>();
  v.cost.cost_ratio = j.at("cost").at("cost_ratio").get<double>();
  for (const auto& w : j.at("warnings")) v.warnings.push_back(w.get<std::string>());
  return v;
}

std::string render_convergence(const std::vector<ConvergenceRow>& rows,
                               const ReportMeta& meta, ReportFormat format,
                               double tolerance) {
  const bool pass = rows.empty() ? false : rows.back().abs_error <= tolerance;
  if (format == ReportFormat::json) {
    ordered_json j = meta_json(meta);
    ordered_json table = ordered_json::array();
    for (const ConvergenceRow& r : rows) {
      ordered_json e;
      e["n"] = r.n;
      e["mean_gamma"] = r.mean_gamma;
      e["std_gamma"] = r.std_gamma;
      e["target"] = r.target;
      e["abs_error"] = r.abs_error;
      table.push_back(std::move(e));
    }
    j["convergence"] = std::move(table);
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    return j.dump(2) + "\n";
  }
  if (format == ReportFormat::tsv) {
    std::ostringstream os;
    os << "n\tmean_gamma\tstd_gamma\ttarget\tabs_error\n";
    char line[200];
    for (const ConvergenceRow& r : rows) {
      std::snprintf(line, sizeof(line), "%llu\t%.17g\t%.17g\t%.17g\t%.17g\n",
                    static_cast<unsigned long long>(r.n), r.mean_gamma,
                    r.std_gamma, r.target, r.abs_error);
      os << line;
    }
    os << "pass\t" << (pass ? 1 : 0) << "\t\t\t\n";
    return os.str();
  }
  std::ostringstream os;
  os << "Limit verification (adabatt)\n";
  os << "mode=" << meta.mode << "  seed=" << meta.seed << "\n";
  os << "source: " << meta.source << "\n\n";
  os << "  n           mean gamma   std          target 1-h   |mean-target|\n";
  char line[200];
  for (const ConvergenceRow& r : rows) {
    std::snprintf(line, sizeof(line), "  %-10llu  %-11.6f  %-11.6f  %-11.6f  %.6f\n",
                  static_cast<unsigned long long>(r.n), r.mean_gamma, r.std_gamma,
                  r.target, r.abs_error);
    os << line;
  }
  os << "\nResult: " << (pass ? "PASS" : "FAIL") << " (|mean-target| at n="
     << (rows.empty() ? 0 : rows.back().n) << " vs tolerance "
     << fmt("%.4g", tolerance) << ")\n";
  return os.str();
}

std::string render_speeds(std::span<const TestDescriptor> battery,
                          const ReportMeta& meta, ReportFormat format) {
  if (format == ReportFormat::json) {
    ordered_json j = meta_json(meta);
    ordered_json table = ordered_json::array();
    for (const TestDescriptor& d : battery) {
      ordered_json e;
      e["test"] = d.id;
      e["bits_per_sec"] = d.speed_bits_per_sec;
      table.push_back(std::move(e));
    }
    j["speeds"] = std::move(table);
    return j.dump(2) + "\n";
  }
  if (format == ReportFormat::tsv) {
    std::ostringstream os;
    os << "test\tbits_per_sec\n";
    char line[128];
    for (const TestDescriptor& d : battery) {
      std::snprintf(line, sizeof(line), "%s\t%.17g\n", d.id.c_str(),
                    d.speed_bits_per_sec);
      os << line;
    }
    return os.str();
  }
  std::ostringstream os;
  os << "Calibrated speeds (adabatt)\n\n";
  os << "  test                bits/second\n";
  char line[128];
  for (const TestDescriptor& d : battery) {
    std::snprintf(line, sizeof(line), "  %-18s  %.4g\n", d.id.c_str(),
                  d.speed_bits_per_sec);
    os << line;
  }
  return os.str();
}

}  // namespace adabatt
