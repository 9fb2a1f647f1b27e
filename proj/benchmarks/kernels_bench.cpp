#include <numbers>

#include <benchmark/benchmark.h>

#include "slepian/kernels.hpp"
#include "slepian/specfun.hpp"

namespace {

using namespace slepian;
constexpr double kPi = std::numbers::pi;

void BM_E_matrix(benchmark::State& state) {
  const int P = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::E_matrix(P, 15.0, 25.0));
}
BENCHMARK(BM_E_matrix)->Arg(10)->Arg(30)->Arg(45)->Unit(benchmark::kMicrosecond);

void BM_G_matrix_all_orders(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state)
    for (int m = 0; m < L; ++m) benchmark::DoNotOptimize(kernels::G_matrix(m, L, kPi / 8, 3 * kPi / 8));
}
BENCHMARK(BM_G_matrix_all_orders)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_wigner_3j(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(specfun::wigner_3j(l, l, l, 2, -1, -1));
}
BENCHMARK(BM_wigner_3j)->Arg(5)->Arg(20)->Arg(38);

void BM_C_kernel(benchmark::State& state) {
  const bool diagonal = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::C_kernel(7, 7, 0.9, diagonal ? 0.9 : 1.3, 15.0, 25.0));
}
BENCHMARK(BM_C_kernel)->Arg(0)->Arg(1);

void BM_fb_radial_couplings(benchmark::State& state) {
  const FourierBesselBand band{1.4, 20, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::fb_radial_couplings(band, 15.0, 25.0));
}
BENCHMARK(BM_fb_radial_couplings)->Arg(35)->Arg(70)->Unit(benchmark::kMillisecond);

}  // namespace
