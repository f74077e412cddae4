#include <benchmark/benchmark.h>

#include <cmath>

#include "cmsim/demapper.hpp"
#include "cmsim/fiber.hpp"
#include "cmsim/ldpc.hpp"
#include "cmsim/rates.hpp"

using namespace cmsim;

namespace {

std::vector<cplx> noisy_symbols(const Constellation& c, double rho,
                                std::size_t n) {
  StreamRng rng(1);
  std::vector<cplx> y(n);
  for (std::size_t l = 0; l < n; ++l)
    y[l] = c.points[rng.uniform_below(c.size())] +
           rng.complex_gaussian(1.0 / rho);
  return y;
}

void BM_LlrExact(benchmark::State& state) {
  const Constellation c = build_square_qam(state.range(0));
  const auto y = noisy_symbols(c, 10.0, 4096);
  for (auto _ : state)
    benchmark::DoNotOptimize(demap(y, 10.0, c, LlrKind::exact));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_LlrExact)->Arg(16)->Arg(64)->Arg(256);

void BM_LlrMaxlog(benchmark::State& state) {
  const Constellation c = build_square_qam(state.range(0));
  const auto y = noisy_symbols(c, 10.0, 4096);
  for (auto _ : state)
    benchmark::DoNotOptimize(demap(y, 10.0, c, LlrKind::maxlog));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_LlrMaxlog)->Arg(16)->Arg(64)->Arg(256);

void BM_MiEstimate(benchmark::State& state) {
  Constellation c = build_square_qam(state.range(0));
  c.square_grid = state.range(1) != 0;  // toggle the separable fast path
  StreamRng rng(2);
  std::vector<cplx> z(10000);
  for (cplx& v : z) v = rng.complex_gaussian(0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(mi_awgn_from_noise(c, 10.0, z));
  state.SetItemsProcessed(state.iterations() * z.size());
}
BENCHMARK(BM_MiEstimate)->Args({16, 1})->Args({16, 0})->Args({64, 1})
    ->Args({64, 0});

void BM_GmiWithSearch(benchmark::State& state) {
  const Constellation c = build_square_qam(64);
  StreamRng rng(3);
  const AwgnFrame sim = simulate_awgn_frame(c, 8.0, 20000, rng,
                                            LlrKind::maxlog);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_gmi(sim.frame));
}
BENCHMARK(BM_GmiWithSearch);

void BM_LdpcDecode(benchmark::State& state) {
  const LdpcCode code = LdpcCode::load_alist_file(
      std::string(CMSIM_DATA_DIR) + "/codes/ira_n4096_r12.alist");
  StreamRng rng(4);
  std::vector<std::uint8_t> info(code.k_info());
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.bit());
  const auto cw = code.encode(info);
  const double rho = std::pow(10.0, 0.14);  // near the waterfall
  const double sigma = std::sqrt(0.5 / rho);
  std::vector<double> llrs(cw.size());
  for (std::size_t i = 0; i < cw.size(); ++i)
    llrs[i] = 2.0 * ((cw[i] ? 1.0 : -1.0) + sigma * rng.gaussian()) /
              (sigma * sigma);
  for (auto _ : state) benchmark::DoNotOptimize(code.decode(llrs));
}
BENCHMARK(BM_LdpcDecode);

void BM_SsfmSpan(benchmark::State& state) {
  FiberParams p;
  p.n_symbols = 4096;
  p.n_channels = 1;
  p.span_length = 10.0;
  const Constellation c = build_square_qam(16);
  StreamRng rng(5);
  std::vector<std::uint8_t> bits(p.n_symbols * 4);
  DualPolSymbols sym;
  for (int q = 0; q < 2; ++q) {
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    sym[q] = map_bits(bits, c);
  }
  const Waveform w = rrc_shape({sym}, p);
  for (auto _ : state) benchmark::DoNotOptimize(ssfm_propagate(w, p));
  state.SetItemsProcessed(state.iterations() * 100);  // steps per span
}
BENCHMARK(BM_SsfmSpan);

}  // namespace

BENCHMARK_MAIN();
