#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adabatt/adaptive.hpp"
#include "adabatt/analysis.hpp"
#include "adabatt/battery.hpp"
#include "adabatt/config.hpp"
#include "adabatt/generators.hpp"
#include "adabatt/report.hpp"

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw adabatt::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::uint8_t> read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
}

std::unique_ptr<adabatt::BitSource> open_source(const adabatt::RunConfig& cfg) {
  if (cfg.input_file) {
    return std::make_unique<adabatt::ByteBufferSource>(read_binary(*cfg.input_file));
  }
  return adabatt::make_source(*cfg.source);
}

std::string source_label(const adabatt::RunConfig& cfg) {
  if (cfg.input_file) return "file(" + *cfg.input_file + ")";
  return adabatt::describe(*cfg.source);
}

int run(const adabatt::RunConfig& cfg, bool quiet) {
  using namespace adabatt;
  ReportMeta meta{to_string(cfg.mode), cfg.alpha, cfg.seed, source_label(cfg)};
  auto battery = make_battery(cfg.tests, cfg.battery_params);

  switch (cfg.mode) {
    case RunMode::battery: {
      auto src = open_source(cfg);
      std::uint64_t length = cfg.length_bits;
      if (cfg.input_file) {
        const auto* buf = static_cast<const ByteBufferSource*>(src.get());
        length = buf->total_bits();
      }
      const BitSequence data = src->generate(length);
      if (cfg.dump_bits) {
        const auto bytes = data.to_bytes();
        std::ofstream out(*cfg.dump_bits, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open dump file '" + *cfg.dump_bits + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
      }
      const Verdict v = run_battery(battery, data, cfg.alpha);
      write_output(cfg.out_path, render_verdict(v, meta, cfg.format));
      if (!quiet)
        std::cerr << "wall time: " << v.cost.wall_seconds << " s\n";
      return v.reject ? kExitReject : kExitAccept;
    }
    case RunMode::adaptive: {
      auto src = open_source(cfg);
      AdaptivePlan plan = cfg.plan;
      if (plan.use_speed_weighting || plan.budget_seconds)
        calibrate_speed(battery, cfg.probe_length);
      const Verdict v = run_adaptive(plan, battery, *src);
      write_output(cfg.out_path, render_verdict(v, meta, cfg.format));
      if (!quiet)
        std::cerr << "wall time: " << v.cost.wall_seconds << " s\n";
      return v.reject ? kExitReject : kExitAccept;
    }
    case RunMode::verify_theorem: {
      KnownSource source =
          std::holds_alternative<BernoulliSpec>(cfg.source->kind)
              ? KnownSource::bernoulli(std::get<BernoulliSpec>(cfg.source->kind).p)
              : KnownSource::markov(
                    std::get<MarkovSpec>(cfg.source->kind).transition);
      const TheoremArm arm =
          cfg.verify.arm == "np" ? TheoremArm::np : TheoremArm::compression;
      const auto rows =
          verify_theorem1(source, arm, cfg.verify.kt_order, cfg.verify.n_grid,
                          cfg.verify.seeds, cfg.seed);
      write_output(cfg.out_path,
                   render_convergence(rows, meta, cfg.format, cfg.verify.tolerance));
      const bool pass = !rows.empty() && rows.back().abs_error <= cfg.verify.tolerance;
      return pass ? kExitAccept : kExitReject;
    }
    case RunMode::calibrate: {
      calibrate_speed(battery, cfg.probe_length);
      write_output(cfg.out_path, render_speeds(battery, meta, cfg.format));
      return kExitAccept;
    }
  }
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adabatt: time-adaptive statistical testing of random number generators"};

  std::string config_path;
  std::string mode_override, out_override, format_override;
  std::uint64_t seed_override = 0;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "configuration file")->required();
  app.add_option("--mode", mode_override, "override the run mode");
  auto* seed_opt = app.add_option("--seed", seed_override, "override the seed");
  app.add_option("--out", out_override, "report path ('-' for stdout)");
  app.add_option("--format", format_override, "report format: human|json|tsv");
  app.add_flag("--quiet", quiet, "suppress diagnostics on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    adabatt::RunConfig cfg = adabatt::parse_config(read_file(config_path));

    // Precedence: --seed beats ADABATT_SEED beats the config file.
    if (const char* env = std::getenv("ADABATT_SEED")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0')
        throw adabatt::ConfigError("ADABATT_SEED: not a non-negative integer");
      cfg.seed = v;
    }
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    if (!mode_override.empty()) cfg.mode = adabatt::mode_from_string(mode_override);
    if (!out_override.empty()) cfg.out_path = out_override;
    if (!format_override.empty())
      cfg.format = adabatt::format_from_string(format_override);

    // A seed override re-seeds a generator-backed source.
    if (cfg.source && (seed_opt->count() > 0 || std::getenv("ADABATT_SEED")))
      cfg.source->seed = cfg.seed;

    return run(cfg, quiet);
  } catch (const adabatt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
