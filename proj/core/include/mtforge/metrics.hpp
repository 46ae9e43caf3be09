#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtforge::metrics {

/// N-gram multiset. Keys are the raw byte slice for character n-grams, or
/// tokens joined with a \x1f separator for token n-grams.
struct NGramProfile {
  int order = 1;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
};

NGramProfile char_ngrams(std::string_view text, int order);
NGramProfile token_ngrams(const std::vector<std::string> &tokens, int order);

/// Sum of min(count_a, count_b) over shared n-grams (clipped matches).
std::uint64_t overlap(const NGramProfile &a, const NGramProfile &b);

/// Character n-gram F-beta over orders 1..max_n, spaces included. Orders
/// where neither side has an n-gram are skipped; precision/recall are
/// averaged across the remaining orders before combining. Two empty
/// strings score 1.0; exactly one empty scores 0.0.
double chrf(std::string_view hyp, std::string_view ref, int max_n = 6,
            double beta = 2.0);

enum class Tokenize { whitespace, character };

Tokenize tokenize_from_string(std::string_view s);

/// whitespace: split on ASCII whitespace runs. character: one token per
/// non-whitespace code point.
std::vector<std::string> tokenize(std::string_view text, Tokenize mode);

/// Geometric mean of clipped n-gram precisions, n = 1..max_n, with
/// add-one smoothing on numerator and denominator for n >= 2 (unigrams
/// unsmoothed), times brevity penalty exp(min(0, 1 - |ref|/|hyp|)).
/// Empty hyp scores 0.0.
double sentence_bleu(const std::vector<std::string> &hyp,
                     const std::vector<std::string> &ref, int max_n = 4);

/// Corpus-level BLEU over aligned segment lists: clipped counts and
/// totals are pooled across segments with no smoothing; orders with no
/// hypothesis n-grams anywhere are skipped. Brevity penalty uses total
/// lengths.
double corpus_bleu(const std::vector<std::vector<std::string>> &hyps,
                   const std::vector<std::vector<std::string>> &refs,
                   int max_n = 4);

/// Probability vector; construction validates non-negativity and unit sum
/// (within 1e-9).
class Distribution {
public:
  explicit Distribution(std::vector<double> probs);
  const std::vector<double> &probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

private:
  std::vector<double> probs_;
};

/// Sum of p_i * ln(p_i / q_i) with 0 * ln(0/q) = 0. Returns +infinity
/// when q_i = 0 at some i with p_i > 0.
double kl_divergence(const Distribution &p, const Distribution &q);

/// (nll_a + nll_b) + lambda * 0.5 * (KL(p, q) + KL(q, p)).
double rdrop_loss(double nll_a, double nll_b, const Distribution &p,
                  const Distribution &q, double lambda = 5.0);

} // namespace mtforge::metrics
