#include <benchmark/benchmark.h>

#include <mtforge/llm_data.hpp>
#include <mtforge/record.hpp>

#include <random>
#include <string>
#include <vector>

namespace {

using namespace mtforge;

std::vector<MonolingualRecord> records(std::size_t n) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> words(20, 600);
  std::uniform_int_distribution<int> group(1, 4);
  std::string blob;
  for (int i = 0; i < 600; ++i) {
    if (i)
      blob += ' ';
    blob += 'w';
  }
  std::vector<MonolingualRecord> out;
  out.reserve(n);
  std::size_t doc = 0;
  while (out.size() < n) {
    std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(group(rng)),
                                          n - out.size());
    std::string doc_id = "d" + std::to_string(doc++);
    for (std::size_t j = 0; j < g; ++j) {
      MonolingualRecord r;
      r.id = "r" + std::to_string(out.size());
      r.text = blob.substr(0, 2 * words(rng) - 1);
      r.lang = Lang::en;
      if (g > 1)
        r.doc_id = doc_id;
      out.push_back(std::move(r));
    }
  }
  return out;
}

void pack_documents(benchmark::State &state) {
  std::vector<MonolingualRecord> recs = records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(llm_data::pack_cpt(recs, 4096));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(pack_documents)->Arg(1000)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
