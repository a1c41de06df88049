// Benchmark of the OpenMP statevector kernels against the serial reference.
// Each kernel is validated against the reference result before timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qpd/hva.hpp"
#include "qpd/model.hpp"
#include "qpd/statevector.hpp"

using namespace qpd;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

double max_diff(const StateVector& a, const StateVector& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a.amp[i] - b.amp[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  int n_min = 10, n_max = 18, reps = 5;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--min" && i + 1 < argc) n_min = std::atoi(argv[++i]);
    else if (arg == "--max" && i + 1 < argc) n_max = std::atoi(argv[++i]);
    else if (arg == "--reps" && i + 1 < argc) reps = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--min N] [--max N] [--reps R]\n", argv[0]);
      return 1;
    }
  }
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif
  std::printf("%-14s %4s %12s %12s %9s %10s\n", "kernel", "N", "serial[ms]", "omp[ms]",
              "speedup", "max|diff|");

  for (int n = n_min; n <= n_max; n += 2) {
    const ClusterGraph graph = make_chain(n);
    const ModelParams params{1.0, 1.0, 0.5};
    const PauliSum h = build_hamiltonian(graph, params);
    const StateVector psi = random_state(n, 42);

    {
      StateVector out_omp, out_ser;
      const double diff = [&] {
        apply_pauli_sum_into(out_omp, psi, h);
        serial::apply_pauli_sum_into(out_ser, psi, h);
        return max_diff(out_omp, out_ser);
      }();
      const double t_ser = time_ms([&] { serial::apply_pauli_sum_into(out_ser, psi, h); }, reps);
      const double t_omp = time_ms([&] { apply_pauli_sum_into(out_omp, psi, h); }, reps);
      std::printf("%-14s %4d %12.3f %12.3f %8.2fx %10.2e\n", "apply_pauli", n, t_ser, t_omp,
                  t_ser / t_omp, diff);
    }
    {
      const double t_ser = time_ms([&] { (void)serial::expectation_and_square(psi, h); }, reps);
      const double t_omp = time_ms([&] { (void)expectation_and_square(psi, h); }, reps);
      const double diff = std::abs(expectation_and_square(psi, h).energy -
                                   serial::expectation_and_square(psi, h).energy);
      std::printf("%-14s %4d %12.3f %12.3f %8.2fx %10.2e\n", "expect_sq", n, t_ser, t_omp,
                  t_ser / t_omp, diff);
    }
    {
      // One HVA layer worth of rotations: an XX block followed by a Z block.
      std::vector<ExpTerm> xx_block, z_block;
      for (const auto& [i, j] : graph.bonds)
        xx_block.push_back({{1.0, {{i, Axis::X}, {j, Axis::X}}}, 0.3});
      for (int i = 0; i < n; ++i) z_block.push_back({{1.0, {{i, Axis::Z}}}, 0.7});
      StateVector s_omp = psi, s_ser = psi;
      apply_exp_block(s_omp, xx_block);
      apply_exp_block(s_omp, z_block);
      serial::apply_exp_block(s_ser, xx_block);
      serial::apply_exp_block(s_ser, z_block);
      const double diff = max_diff(s_omp, s_ser);
      const double t_ser = time_ms(
          [&] {
            StateVector s = psi;
            serial::apply_exp_block(s, xx_block);
            serial::apply_exp_block(s, z_block);
          },
          reps);
      const double t_omp = time_ms(
          [&] {
            StateVector s = psi;
            apply_exp_block(s, xx_block);
            apply_exp_block(s, z_block);
          },
          reps);
      std::printf("%-14s %4d %12.3f %12.3f %8.2fx %10.2e\n", "exp_block", n, t_ser, t_omp,
                  t_ser / t_omp, diff);
    }
  }
  return 0;
}
