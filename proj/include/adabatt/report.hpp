#pragma once

#include <string>
#include <vector>

#include "adabatt/analysis.hpp"
#include "adabatt/battery.hpp"
#include "adabatt/config.hpp"

namespace adabatt {

/// Report header fields. Reports contain only deterministic content:
/// identical config and seeds produce byte-identical output (timing goes to
/// diagnostics, never into a report).
struct ReportMeta {
  std::string mode;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::string source;
};

/// p-values in scientific notation to two significant digits.
std::string format_pvalue(double p);
/// Per-byte gamma cell in the "a 10^-7" style, two significant digits;
/// gamma is per bit.
std::string format_gamma_per_byte(double gamma_per_bit);

std::string render_verdict(const Verdict& v, const ReportMeta& meta,
                           ReportFormat format);
std::string render_convergence(const std::vector<ConvergenceRow>& rows,
                               const ReportMeta& meta, ReportFormat format,
                               double tolerance);
std::string render_speeds(std::span<const TestDescriptor> battery,
                          const ReportMeta& meta, ReportFormat format);

/// JSON form of render_verdict(..., ReportFormat::json).
std::string verdict_to_json(const Verdict& v, const ReportMeta& meta);
/// Inverse of verdict_to_json; elapsed-time fields come back as zero.
Verdict verdict_from_json(const std::string& json_text);

}  // namespace adabatt
