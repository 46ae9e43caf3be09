#include <benchmark/benchmark.h>

#include <mtforge/preprocess.hpp>
#include <mtforge/record.hpp>

#include <random>
#include <string>
#include <vector>

namespace {

using namespace mtforge;

std::vector<SentencePair> corpus(std::size_t n) {
  std::mt19937_64 rng(17);
  static const char *vocab[] = {"one", "two", "three", "four", "five",
                                "six", "seven", "eight", "nine", "ten"};
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> len(4, 24);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<SentencePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SentencePair p;
    p.id = "p" + std::to_string(i);
    int k = len(rng);
    for (int j = 0; j < k; ++j) {
      if (j)
        p.src += ' ';
      p.src += vocab[pick(rng)];
    }
    p.tgt = "第" + std::to_string(i % 97) + "句";
    p.origin = Origin::authentic;
    p.scores["sim"] = score(rng);
    out.push_back(std::move(p));
  }
  return out;
}

void dedup_corpus(benchmark::State &state) {
  std::vector<SentencePair> pairs = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(preprocess::dedup_pairs(pairs));
}
BENCHMARK(dedup_corpus)->Arg(1000)->Arg(10000);

void length_cut(benchmark::State &state) {
  std::vector<SentencePair> pairs = corpus(static_cast<std::size_t>(state.range(0)));
  preprocess::FilterConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(preprocess::filter_length(pairs, cfg));
}
BENCHMARK(length_cut)->Arg(1000)->Arg(10000);

void similarity_cut(benchmark::State &state) {
  std::vector<SentencePair> pairs = corpus(static_cast<std::size_t>(state.range(0)));
  preprocess::FilterConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(preprocess::filter_similarity(pairs, cfg));
}
BENCHMARK(similarity_cut)->Arg(1000)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
