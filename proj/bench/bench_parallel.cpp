// Serial vs OpenMP timings for the two parallel kernels: chained importance
// sampling and exhaustive enumeration.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <memory>

#include "dffg/estimator.hpp"
#include "dffg/oracle.hpp"

using namespace dffg;

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const std::uint64_t L = argc > 1 ? std::stoull(argv[1]) : 200000;
  const std::uint32_t chains = 8;
  std::printf("threads: %d\n", omp_get_max_threads());

  Rng rng(7);
  auto big = std::make_shared<const LatticeTopology>(build_lattice({30, 30}, {true, true}));
  const auto model = sample_params(big, Family::kIsing, 2, UniformParam{0.25, 1.5}, UniformParam{-1.5, -1.25}, rng);
  EstimateSeries a, b;
  const double ts = time_ms([&] { a = run_chains_serial(model, SamplerKind::kImportance, L, 1, chains); });
  const double tp = time_ms([&] { b = run_chains(model, SamplerKind::kImportance, L, 1, chains); });
  std::printf("IS 30x30, L=%llu, %u chains: serial %.1f ms, parallel %.1f ms, speedup %.2fx, identical=%d\n",
              static_cast<unsigned long long>(L), chains, ts, tp, ts / tp, a.ln_Z == b.ln_Z);

  auto small = std::make_shared<const LatticeTopology>(build_lattice({3, 3}, {true, true}));
  const auto m2 = sample_params(small, Family::kIsing, 2, UniformParam{0.25, 1.5}, UniformParam{-1.5, -1.25}, rng);
  double za = 0, zb = 0;
  const double es = time_ms([&] { za = exact_log_Zd_serial(m2); });
  const double ep = time_ms([&] { zb = exact_log_Zd(m2); });
  std::printf("enumerate Z_d 3x3 (2^18): serial %.1f ms, parallel %.1f ms, speedup %.2fx, |diff|=%.3g\n", es, ep,
              es / ep, std::abs(za - zb));
  return 0;
}
