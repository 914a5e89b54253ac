// Compares the OpenMP kernels against the serial reference implementations
// and reports throughput for both.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "adabatt/battery.hpp"
#include "adabatt/kernels.hpp"
#include "adabatt/serial_ref.hpp"
#include "adabatt/universal_code.hpp"

namespace {

using adabatt::BitSequence;
using Clock = std::chrono::steady_clock;

template <typename F>
double time_best_of(F&& f, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

volatile std::uint64_t g_sink_u = 0;
volatile double g_sink_d = 0.0;

struct Row {
  const char* name;
  double serial_s;
  double parallel_s;
};

void print_row(const Row& r, std::uint64_t bits) {
  const double gbps_serial = bits / r.serial_s / 1e9;
  const double gbps_par = bits / r.parallel_s / 1e9;
  std::printf("%-18s  %10.4f ms  %10.4f ms  %8.3f Gbit/s  %8.3f Gbit/s  %6.2fx\n",
              r.name, r.serial_s * 1e3, r.parallel_s * 1e3, gbps_serial, gbps_par,
              r.serial_s / r.parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adabatt kernel benchmark: serial reference vs OpenMP"};
  std::uint64_t bits = 1ull << 24;
  int reps = 3;
  app.add_option("--bits", bits, "sequence length in bits");
  app.add_option("--reps", reps, "repetitions (best-of)");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP: disabled at build time\n");
#endif
  std::printf("input: %llu bits\n\n", static_cast<unsigned long long>(bits));
  std::printf("%-18s  %13s  %13s  %15s  %15s  %7s\n", "kernel", "serial",
              "parallel", "serial rate", "parallel rate", "speedup");

  const BitSequence x = adabatt::uniform_bits(bits, 0xbe9c);

  print_row({"count_ones",
             time_best_of([&] { g_sink_u = adabatt::serial_ref::count_ones(x); }, reps),
             time_best_of([&] { g_sink_u = adabatt::kernels::count_ones(x); }, reps)},
            bits);
  print_row({"count_runs",
             time_best_of([&] { g_sink_u = adabatt::serial_ref::count_runs(x); }, reps),
             time_best_of([&] { g_sink_u = adabatt::kernels::count_runs(x); }, reps)},
            bits);
  print_row({"pair_counts",
             time_best_of([&] { g_sink_u = adabatt::serial_ref::pair_counts_cyclic(x)[3]; }, reps),
             time_best_of([&] { g_sink_u = adabatt::kernels::pair_counts_cyclic(x)[3]; }, reps)},
            bits);
  print_row({"block_deviation",
             time_best_of([&] { g_sink_u = adabatt::serial_ref::block_deviation_sq(x, 128); }, reps),
             time_best_of([&] { g_sink_u = adabatt::kernels::block_deviation_sq(x, 128); }, reps)},
            bits);
  print_row({"cusum_extrema",
             time_best_of([&] { g_sink_u = static_cast<std::uint64_t>(
                                    adabatt::serial_ref::cusum_extrema(x).max_s); }, reps),
             time_best_of([&] { g_sink_u = static_cast<std::uint64_t>(
                                    adabatt::kernels::cusum_extrema(x).max_s); }, reps)},
            bits);
  print_row({"context_counts.k2",
             time_best_of([&] { g_sink_u = adabatt::serial_ref::context_counts(x, 2)[0][0]; }, reps),
             time_best_of([&] { g_sink_u = adabatt::kernels::context_counts(x, 2)[0][0]; }, reps)},
            bits);
  print_row({"code_length.k2",
             time_best_of([&] { g_sink_d = adabatt::serial_ref::code_length(x, 2); }, reps),
             time_best_of([&] { g_sink_d = adabatt::code_length(x, 2); }, reps)},
            bits);
  return 0;
}
