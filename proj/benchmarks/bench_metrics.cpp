#include <benchmark/benchmark.h>

#include <mtforge/metrics.hpp>

#include <random>
#include <string>
#include <vector>

namespace {

using namespace mtforge;

std::string sentence(std::mt19937_64 &rng, int words) {
  static const char *vocab[] = {"the", "cat", "sat", "on", "mat",
                                "a",   "dog", "ran", "far", "away"};
  std::uniform_int_distribution<int> pick(0, 9);
  std::string s;
  for (int i = 0; i < words; ++i) {
    if (i)
      s += ' ';
    s += vocab[pick(rng)];
  }
  return s;
}

void chrf_sentence(benchmark::State &state) {
  std::mt19937_64 rng(1);
  int words = static_cast<int>(state.range(0));
  std::string hyp = sentence(rng, words);
  std::string ref = sentence(rng, words);
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::chrf(hyp, ref));
}
BENCHMARK(chrf_sentence)->Arg(8)->Arg(32)->Arg(128);

void bleu_sentence(benchmark::State &state) {
  std::mt19937_64 rng(2);
  int words = static_cast<int>(state.range(0));
  std::vector<std::string> hyp =
      metrics::tokenize(sentence(rng, words), metrics::Tokenize::whitespace);
  std::vector<std::string> ref =
      metrics::tokenize(sentence(rng, words), metrics::Tokenize::whitespace);
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::sentence_bleu(hyp, ref));
}
BENCHMARK(bleu_sentence)->Arg(8)->Arg(32)->Arg(128);

void character_tokenize(benchmark::State &state) {
  std::mt19937_64 rng(3);
  std::string text = sentence(rng, 64);
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::tokenize(text, metrics::Tokenize::character));
}
BENCHMARK(character_tokenize);

} // namespace

BENCHMARK_MAIN();
