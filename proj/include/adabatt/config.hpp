#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adabatt/adaptive.hpp"
#include "adabatt/battery.hpp"
#include "adabatt/generators.hpp"

namespace adabatt {

/// Configuration problem with the offending key in the message.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { battery, adaptive, verify_theorem, calibrate };
enum class ReportFormat { human, json, tsv };

struct VerifySpec {
  std::string arm = "np";  // "np" | "compression"
  int kt_order = 0;
  std::vector<std::uint64_t> n_grid = {1000, 10000, 100000};
  int seeds = 30;
  double tolerance = 0.02;
};

struct RunConfig {
  RunMode mode = RunMode::battery;
  double alpha = 0.001;
  std::uint64_t seed = 1;
  std::uint64_t length_bits = 1u << 20;  // battery-mode window
  std::uint64_t probe_length = 1u << 18;  // calibration probe

  std::optional<GeneratorSpec> source;       // exactly one of source/input_file
  std::optional<std::string> input_file;

  AdaptivePlan plan;
  std::vector<std::string> tests;  // battery member ids, registry order
  BatteryParams battery_params;

  VerifySpec verify;

  ReportFormat format = ReportFormat::human;
  std::string out_path = "-";
  std::optional<std::string> dump_bits;  // battery mode: raw dump of the window
};

/// Parses the key-value configuration syntax (see docs/config.md): top-level
/// keys plus [source], [source.good], [source.bad], [plan], [battery],
/// [verify], [output] sections. Unknown keys, missing required fields and
/// inconsistent values raise ConfigError naming the key.
RunConfig parse_config(const std::string& text);

std::string to_string(RunMode mode);
RunMode mode_from_string(const std::string& s);
ReportFormat format_from_string(const std::string& s);

}  // namespace adabatt
