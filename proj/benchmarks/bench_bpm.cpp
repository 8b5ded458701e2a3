// Microbenchmarks for the hot paths: moment transforms, cell probabilities,
// posterior evaluation, the f0 Gibbs draw, and whole sampler sweeps.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "bpm/estimators.hpp"
#include "bpm/freq_data.hpp"
#include "bpm/mcmc.hpp"
#include "bpm/model.hpp"
#include "bpm/moments.hpp"

namespace {

bpm::CanonicalMoments random_state(std::size_t m_star) {
  std::mt19937_64 rng(871 + m_star);
  std::uniform_real_distribution<double> interior(0.05, 0.95);
  std::vector<double> c(m_star);
  for (auto& ck : c) ck = interior(rng);
  return bpm::CanonicalMoments(std::move(c));
}

void BM_canonical_to_ordinary(benchmark::State& state) {
  const auto c = random_state(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bpm::canonical_to_ordinary(c));
}
BENCHMARK(BM_canonical_to_ordinary)->Arg(7)->Arg(10)->Arg(30);

void BM_ordinary_to_canonical(benchmark::State& state) {
  const auto m =
      bpm::canonical_to_ordinary(random_state(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(bpm::ordinary_to_canonical(m));
}
BENCHMARK(BM_ordinary_to_canonical)->Arg(7)->Arg(10)->Arg(30);

void BM_count_probabilities(benchmark::State& state) {
  const auto c = random_state(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bpm::count_probabilities(c, 4.0));
}
BENCHMARK(BM_count_probabilities)->Arg(7)->Arg(12);

void BM_log_posterior(benchmark::State& state) {
  const auto& traffic = bpm::builtin_dataset("traffic");
  bpm::ModelParams params;
  params.c = random_state(static_cast<std::size_t>(traffic.max_count()));
  params.u = 4.0;
  params.N = 3 * traffic.n();
  const bpm::PriorConfig prior;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bpm::log_posterior(params, traffic, prior, bpm::FitMode::full_bayes));
}
BENCHMARK(BM_log_posterior);

void BM_draw_f0(benchmark::State& state) {
  bpm::RngEngine rng(31);
  for (auto _ : state)
    benchmark::DoNotOptimize(bpm::draw_f0(20, 0.9, bpm::NPrior::uniform, rng));
}
BENCHMARK(BM_draw_f0);

void BM_chao(benchmark::State& state) {
  const auto& meth = bpm::builtin_dataset("methamphetamine");
  for (auto _ : state) benchmark::DoNotOptimize(bpm::chao_lower_bound(meth));
}
BENCHMARK(BM_chao);

void BM_sampler_sweeps(benchmark::State& state) {
  const auto& traffic = bpm::builtin_dataset("traffic");
  const bpm::PriorConfig prior;
  bpm::SamplerConfig cfg;
  cfg.iterations = state.range(0);
  cfg.burn_in = 0;
  cfg.seed = 99;
  for (auto _ : state)
    benchmark::DoNotOptimize(bpm::run_sampler(traffic, prior, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_sampler_sweeps)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_summarize(benchmark::State& state) {
  bpm::Chain chain;
  std::mt19937_64 rng(7);
  chain.N.resize(100000);
  chain.u.assign(chain.N.size(), 2.0);
  chain.m1.assign(chain.N.size(), 0.5);
  for (auto& v : chain.N) v = 9000 + static_cast<long long>(rng() % 2000);
  for (auto _ : state) benchmark::DoNotOptimize(bpm::summarize(chain, 0));
}
BENCHMARK(BM_summarize);

}  // namespace

BENCHMARK_MAIN();
