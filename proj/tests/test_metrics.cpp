#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtforge/error.hpp"
#include "mtforge/metrics.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace mtforge;

namespace {

// Reference implementations written straight from the definitions, kept
// deliberately naive and independent of the library internals.

std::vector<std::string> split_codepoints(const std::string &s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    std::size_t len = 1;
    if (c >= 0xF0)
      len = 4;
    else if (c >= 0xE0)
      len = 3;
    else if (c >= 0xC0)
      len = 2;
    if (i + len > s.size())
      len = 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::map<std::string, int> gram_counts(const std::vector<std::string> &units,
                                       std::size_t n) {
  std::map<std::string, int> counts;
  if (units.size() < n)
    return counts;
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j)
      key += units[i + j] + "\x01";
    ++counts[key];
  }
  return counts;
}

int overlap_count(const std::map<std::string, int> &a,
                  const std::map<std::string, int> &b) {
  int total = 0;
  for (const auto &[k, v] : a) {
    auto it = b.find(k);
    if (it != b.end())
      total += std::min(v, it->second);
  }
  return total;
}

double chrf_oracle(const std::string &hyp, const std::string &ref, int max_n,
                   double beta) {
  std::vector<std::string> h = split_codepoints(hyp);
  std::vector<std::string> r = split_codepoints(ref);
  double sum_p = 0, sum_r = 0;
  int used = 0;
  for (int n = 1; n <= max_n; ++n) {
    auto hg = gram_counts(h, n);
    auto rg = gram_counts(r, n);
    if (hg.empty() && rg.empty())
      continue;
    ++used;
    int ov = overlap_count(hg, rg);
    int ht = 0, rt = 0;
    for (const auto &[k, v] : hg)
      ht += v;
    for (const auto &[k, v] : rg)
      rt += v;
    sum_p += ht ? double(ov) / ht : 0.0;
    sum_r += rt ? double(ov) / rt : 0.0;
  }
  if (used == 0)
    return 1.0;
  double p = sum_p / used, q = sum_r / used;
  double denom = beta * beta * p + q;
  if (denom == 0)
    return 0.0;
  return (1 + beta * beta) * p * q / denom;
}

double bleu_oracle(const std::vector<std::string> &hyp,
                   const std::vector<std::string> &ref, int max_n) {
  if (hyp.empty())
    return 0.0;
  double log_sum = 0;
  for (int n = 1; n <= max_n; ++n) {
    auto hg = gram_counts(hyp, n);
    auto rg = gram_counts(ref, n);
    int matched = overlap_count(hg, rg);
    int total = 0;
    for (const auto &[k, v] : hg)
      total += v;
    double p;
    if (n == 1) {
      if (matched == 0 || total == 0)
        return 0.0;
      p = double(matched) / total;
    } else {
      p = double(matched + 1) / double(total + 1);
    }
    log_sum += std::log(p);
  }
  double bp = std::exp(std::min(0.0, 1.0 - double(ref.size()) / hyp.size()));
  return bp * std::exp(log_sum / max_n);
}

double corpus_bleu_oracle(const std::vector<std::vector<std::string>> &hyps,
                          const std::vector<std::vector<std::string>> &refs,
                          int max_n) {
  std::size_t hyp_len = 0, ref_len = 0;
  std::vector<long> matched(max_n + 1, 0), total(max_n + 1, 0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += hyps[i].size();
    ref_len += refs[i].size();
    for (int n = 1; n <= max_n; ++n) {
      auto hg = gram_counts(hyps[i], n);
      auto rg = gram_counts(refs[i], n);
      matched[n] += overlap_count(hg, rg);
      for (const auto &[k, v] : hg)
        total[n] += v;
    }
  }
  if (hyp_len == 0)
    return 0.0;
  double log_sum = 0;
  int used = 0;
  for (int n = 1; n <= max_n; ++n) {
    if (total[n] == 0)
      continue;
    if (matched[n] == 0)
      return 0.0;
    log_sum += std::log(double(matched[n]) / total[n]);
    ++used;
  }
  if (used == 0)
    return 0.0;
  double bp = std::exp(std::min(0.0, 1.0 - double(ref_len) / hyp_len));
  return bp * std::exp(log_sum / used);
}

double kl_oracle(const std::vector<double> &p, const std::vector<double> &q) {
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0)
      continue;
    if (q[i] == 0)
      return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

std::string random_text(std::mt19937 &gen, int max_len) {
  static const std::vector<std::string> alphabet = {"a", "b", "c",  " ",
                                                    "好", "的", "界"};
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out;
  int n = len(gen);
  for (int i = 0; i < n; ++i)
    out += alphabet[pick(gen)];
  return out;
}

std::vector<std::string> random_tokens(std::mt19937 &gen, int max_len) {
  static const std::vector<std::string> vocab = {"the", "cat", "sat", "on",
                                                 "mat", "dog"};
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::vector<std::string> out;
  int n = len(gen);
  for (int i = 0; i < n; ++i)
    out.push_back(vocab[pick(gen)]);
  return out;
}

} // namespace

TEST_CASE("chrf frozen values") {
  CHECK(metrics::chrf("abcd", "abce", 2, 2.0) == doctest::Approx(17.0 / 24.0).epsilon(1e-12));
  CHECK(metrics::chrf("", "", 6, 2.0) == 1.0);
  CHECK(metrics::chrf("abc", "", 6, 2.0) == 0.0);
  CHECK(metrics::chrf("", "abc", 6, 2.0) == 0.0);
  CHECK(metrics::chrf("same text", "same text") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chrf includes spaces and counts code points, not bytes") {
  // "a b" vs "a-b": the space itself participates in the grams.
  CHECK(metrics::chrf("a b", "a b") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metrics::chrf("a b", "a-b", 1, 2.0) ==
        doctest::Approx(chrf_oracle("a b", "a-b", 1, 2.0)).epsilon(1e-12));
  // Multibyte: three CJK chars differ from the same chars reordered.
  CHECK(metrics::chrf("好的界", "好界的", 2, 2.0) ==
        doctest::Approx(chrf_oracle("好的界", "好界的", 2, 2.0)).epsilon(1e-12));
}

TEST_CASE("chrf matches the naive implementation on random strings") {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string h = random_text(gen, 14);
    std::string r = random_text(gen, 14);
    for (int max_n : {1, 2, 3, 6}) {
      double got = metrics::chrf(h, r, max_n, 2.0);
      double want = chrf_oracle(h, r, max_n, 2.0);
      CAPTURE(h);
      CAPTURE(r);
      CAPTURE(max_n);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("sentence bleu frozen value") {
  std::vector<std::string> hyp = {"the", "cat"};
  std::vector<std::string> ref = {"the", "cat", "sat"};
  CHECK(metrics::sentence_bleu(hyp, ref) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("sentence bleu edge rules") {
  std::vector<std::string> none;
  std::vector<std::string> ref = {"the"};
  CHECK(metrics::sentence_bleu(none, ref) == 0.0);
  CHECK(metrics::sentence_bleu(ref, ref) == doctest::Approx(1.0).epsilon(1e-12));
  // No unigram match -> hard zero, no smoothing at order one.
  CHECK(metrics::sentence_bleu({"dog"}, {"cat"}) == 0.0);
  // Hypothesis shorter than n: higher orders contribute log(1).
  CHECK(metrics::sentence_bleu({"the"}, {"the"}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sentence bleu matches the naive implementation on random tokens") {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 2000; ++trial) {
    auto h = random_tokens(gen, 9);
    auto r = random_tokens(gen, 9);
    double got = metrics::sentence_bleu(h, r, 4);
    double want = bleu_oracle(h, r, 4);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("corpus bleu pools counts and matches the naive implementation") {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> segs(1, 5);
    std::vector<std::vector<std::string>> hyps, refs;
    int n = segs(gen);
    for (int i = 0; i < n; ++i) {
      hyps.push_back(random_tokens(gen, 9));
      refs.push_back(random_tokens(gen, 9));
    }
    double got = metrics::corpus_bleu(hyps, refs, 4);
    double want = corpus_bleu_oracle(hyps, refs, 4);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("corpus bleu rejects misaligned corpora") {
  CHECK_THROWS_AS(metrics::corpus_bleu({{"a"}}, {}), error);
}

TEST_CASE("tokenize modes") {
  CHECK(metrics::tokenize("the cat", metrics::Tokenize::whitespace) ==
        std::vector<std::string>{"the", "cat"});
  CHECK(metrics::tokenize("  a  b ", metrics::Tokenize::whitespace) ==
        std::vector<std::string>{"a", "b"});
  CHECK(metrics::tokenize("ab c", metrics::Tokenize::character) ==
        std::vector<std::string>{"a", "b", "c"});
  CHECK(metrics::tokenize("好的", metrics::Tokenize::character) ==
        std::vector<std::string>{"好", "的"});
  CHECK(metrics::tokenize_from_string("whitespace") ==
        metrics::Tokenize::whitespace);
  CHECK(metrics::tokenize_from_string("character") ==
        metrics::Tokenize::character);
  CHECK_THROWS_AS(metrics::tokenize_from_string("word"), error);
}

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(metrics::Distribution({0.5, 0.5}));
  CHECK_NOTHROW(metrics::Distribution({1.0, 0.0}));
  CHECK_THROWS_AS(metrics::Distribution({0.5, 0.4}), error);
  CHECK_THROWS_AS(metrics::Distribution({-0.1, 1.1}), error);
  CHECK_THROWS_AS(metrics::Distribution({}), error);
}

TEST_CASE("kl divergence frozen values") {
  metrics::Distribution p({0.75, 0.25});
  metrics::Distribution q({0.25, 0.75});
  CHECK(metrics::kl_divergence(p, q) ==
        doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
  metrics::Distribution point({1.0, 0.0});
  metrics::Distribution half({0.5, 0.5});
  CHECK(metrics::kl_divergence(point, half) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isinf(metrics::kl_divergence(half, point)));
}

TEST_CASE("kl divergence is zero on itself and never negative") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> raw = {u(gen), u(gen), u(gen), u(gen)};
    double sum = raw[0] + raw[1] + raw[2] + raw[3];
    for (double &x : raw)
      x /= sum;
    metrics::Distribution p(raw);
    CHECK(metrics::kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<double> raw2 = {u(gen), u(gen), u(gen), u(gen)};
    double sum2 = raw2[0] + raw2[1] + raw2[2] + raw2[3];
    for (double &x : raw2)
      x /= sum2;
    metrics::Distribution q(raw2);
    double kl = metrics::kl_divergence(p, q);
    CHECK(kl >= 0.0);
    CHECK(kl == doctest::Approx(kl_oracle(raw, raw2)).epsilon(1e-12));
  }
}

TEST_CASE("rdrop loss fixture") {
  metrics::Distribution p({0.75, 0.25});
  metrics::Distribution q({0.25, 0.75});
  double got = metrics::rdrop_loss(1.0, 1.0, p, q, 5.0);
  // 2 + 5 * (KL(p,q) + KL(q,p)) / 2, symmetric halves equal here.
  CHECK(got == doctest::Approx(4.7465).epsilon(1e-3));
  CHECK(got == doctest::Approx(2.0 + 5.0 * 0.5 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("rdrop loss is symmetric and validates lambda") {
  metrics::Distribution p({0.6, 0.4});
  metrics::Distribution q({0.3, 0.7});
  CHECK(metrics::rdrop_loss(0.5, 1.5, p, q, 2.0) ==
        doctest::Approx(metrics::rdrop_loss(1.5, 0.5, q, p, 2.0)).epsilon(1e-12));
  CHECK(metrics::rdrop_loss(1.0, 1.0, p, p, 7.0) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(metrics::rdrop_loss(1.0, 1.0, p, q, -1.0), error);
}

TEST_CASE("ngram profiles are reusable") {
  metrics::NGramProfile a = metrics::char_ngrams("abab", 2);
  CHECK(a.total == 3);
  CHECK(a.counts.at("ab") == 2);
  metrics::NGramProfile b = metrics::char_ngrams("abba", 2);
  CHECK(metrics::overlap(a, b) == 2); // ab once, bb none, ba once... min sums
}
