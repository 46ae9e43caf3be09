#include <benchmark/benchmark.h>

#include <mtforge/mbr.hpp>
#include <mtforge/metrics.hpp>
#include <mtforge/record.hpp>

#include <random>
#include <string>
#include <vector>

namespace {

using namespace mtforge;

std::vector<Hypothesis> sampled_pool(std::size_t n) {
  std::mt19937_64 rng(n);
  static const char *vocab[] = {"猫", "坐", "在", "垫子", "上", "了"};
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> len(3, 8);
  std::vector<Hypothesis> out;
  for (std::size_t i = 0; i < n; ++i) {
    Hypothesis h;
    h.src_id = "s";
    h.system = System::nmt;
    h.method = GenMethod::sampled;
    int k = len(rng);
    for (int j = 0; j < k; ++j)
      h.text += vocab[pick(rng)];
    out.push_back(std::move(h));
  }
  return out;
}

void pool_dedup(benchmark::State &state) {
  std::vector<Hypothesis> hyps = sampled_pool(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(mbr::make_pool(hyps));
}
BENCHMARK(pool_dedup)->Arg(16)->Arg(64)->Arg(256);

// The quadratic part: |H|^2 utility calls per pool.
void consensus_select(benchmark::State &state) {
  std::vector<Hypothesis> hyps = sampled_pool(static_cast<std::size_t>(state.range(0)));
  mbr::HypothesisPool pool = mbr::make_pool(hyps);
  mbr::Utility chrf = mbr::utility_by_name("chrf");
  for (auto _ : state)
    benchmark::DoNotOptimize(mbr::mbr_select(pool, chrf, true));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(pool.candidates.size() *
                                                    pool.candidates.size()));
}
BENCHMARK(consensus_select)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
