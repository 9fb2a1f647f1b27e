#include <random>

#include <benchmark/benchmark.h>

#include "slepian/transforms.hpp"

namespace {

using namespace slepian;

HarmonicCoeffs random_coeffs(const FourierLaguerreBand& band) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  HarmonicCoeffs c = HarmonicCoeffs::zeros(band);
  for (auto& v : c.values) v = {n(rng), n(rng)};
  return c;
}

void BM_synthesis_fl_grid(benchmark::State& state) {
  const int B = static_cast<int>(state.range(0));
  const HarmonicCoeffs c = random_coeffs({B, B});
  const SpatialGrid g = SpatialGrid::fourier_laguerre(B, B);
  for (auto _ : state) benchmark::DoNotOptimize(synthesis_fl(c, g));
}
BENCHMARK(BM_synthesis_fl_grid)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_analysis_fl(benchmark::State& state) {
  const int B = static_cast<int>(state.range(0));
  const FourierLaguerreBand band{B, B};
  const SpatialGrid g = SpatialGrid::fourier_laguerre(B, B);
  const Eigen::VectorXcd f = synthesis_fl(random_coeffs(band), g);
  for (auto _ : state) benchmark::DoNotOptimize(analysis_fl(f, g, band));
}
BENCHMARK(BM_analysis_fl)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
