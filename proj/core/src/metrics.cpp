#include "mtforge/metrics.hpp"

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mtforge::metrics {

NGramProfile char_ngrams(std::string_view text, int order) {
  if (order < 1)
    throw error("n-gram order must be >= 1");
  NGramProfile prof;
  prof.order = order;
  // byte offsets of each code point start, plus the end sentinel
  std::vector<std::size_t> starts;
  std::size_t i = 0;
  while (i < text.size()) {
    starts.push_back(i);
    text::next_codepoint(text, i);
  }
  starts.push_back(text.size());
  std::size_t n_cp = starts.size() - 1;
  for (std::size_t s = 0; s + static_cast<std::size_t>(order) <= n_cp; ++s) {
    std::string gram(text.substr(starts[s], starts[s + order] - starts[s]));
    ++prof.counts[std::move(gram)];
    ++prof.total;
  }
  return prof;
}

NGramProfile token_ngrams(const std::vector<std::string> &tokens, int order) {
  if (order < 1)
    throw error("n-gram order must be >= 1");
  NGramProfile prof;
  prof.order = order;
  for (std::size_t s = 0;
       s + order <= tokens.size(); ++s) {
    std::string gram = tokens[s];
    for (int k = 1; k < order; ++k) {
      gram.push_back('\x1f');
      gram += tokens[s + k];
    }
    ++prof.counts[std::move(gram)];
    ++prof.total;
  }
  return prof;
}

std::uint64_t overlap(const NGramProfile &a, const NGramProfile &b) {
  const NGramProfile &small = a.counts.size() <= b.counts.size() ? a : b;
  const NGramProfile &large = a.counts.size() <= b.counts.size() ? b : a;
  std::uint64_t matched = 0;
  for (const auto &[gram, count] : small.counts) {
    auto it = large.counts.find(gram);
    if (it != large.counts.end())
      matched += std::min(count, it->second);
  }
  return matched;
}

double chrf(std::string_view hyp, std::string_view ref, int max_n,
            double beta) {
  if (max_n < 1)
    throw error("chrf max_n must be >= 1");
  if (hyp.empty() && ref.empty())
    return 1.0;
  if (hyp.empty() || ref.empty())
    return 0.0;
  double precision_sum = 0.0, recall_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    NGramProfile h = char_ngrams(hyp, n);
    NGramProfile r = char_ngrams(ref, n);
    if (h.total == 0 && r.total == 0)
      continue;
    std::uint64_t matched = overlap(h, r);
    precision_sum +=
        h.total ? static_cast<double>(matched) / static_cast<double>(h.total)
                : 0.0;
    recall_sum +=
        r.total ? static_cast<double>(matched) / static_cast<double>(r.total)
                : 0.0;
    ++orders;
  }
  if (orders == 0)
    return 0.0;
  double p = precision_sum / orders;
  double r = recall_sum / orders;
  double b2 = beta * beta;
  double denom = b2 * p + r;
  return denom > 0.0 ? (1.0 + b2) * p * r / denom : 0.0;
}

Tokenize tokenize_from_string(std::string_view s) {
  if (s == "whitespace")
    return Tokenize::whitespace;
  if (s == "character")
    return Tokenize::character;
  throw error("unknown tokenization \"" + std::string(s) + "\"");
}

std::vector<std::string> tokenize(std::string_view text, Tokenize mode) {
  std::vector<std::string> out;
  if (mode == Tokenize::whitespace) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      std::size_t start = i;
      while (i < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      if (i > start)
        out.emplace_back(text.substr(start, i - start));
    }
    return out;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    char32_t cp = text::next_codepoint(text, i);
    if (cp < 0x80 && std::isspace(static_cast<int>(cp)))
      continue;
    out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

double sentence_bleu(const std::vector<std::string> &hyp,
                     const std::vector<std::string> &ref, int max_n) {
  if (max_n < 1)
    throw error("bleu max_n must be >= 1");
  if (hyp.empty())
    return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    NGramProfile h = token_ngrams(hyp, n);
    NGramProfile r = token_ngrams(ref, n);
    std::uint64_t matched = overlap(h, r);
    double num, den;
    if (n == 1) {
      num = static_cast<double>(matched);
      den = static_cast<double>(h.total);
    } else {
      num = static_cast<double>(matched) + 1.0;
      den = static_cast<double>(h.total) + 1.0;
    }
    if (num == 0.0)
      return 0.0;
    log_sum += std::log(num / den);
  }
  double bp =
      std::exp(std::min(0.0, 1.0 - static_cast<double>(ref.size()) /
                                       static_cast<double>(hyp.size())));
  return bp * std::exp(log_sum / max_n);
}

double corpus_bleu(const std::vector<std::vector<std::string>> &hyps,
                   const std::vector<std::vector<std::string>> &refs,
                   int max_n) {
  if (max_n < 1)
    throw error("bleu max_n must be >= 1");
  if (hyps.size() != refs.size())
    throw error("corpus bleu needs equal hyp and ref counts, got " +
                std::to_string(hyps.size()) + " and " +
                std::to_string(refs.size()));
  std::vector<std::uint64_t> matched(static_cast<std::size_t>(max_n), 0);
  std::vector<std::uint64_t> total(static_cast<std::size_t>(max_n), 0);
  std::uint64_t hyp_len = 0, ref_len = 0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    hyp_len += hyps[s].size();
    ref_len += refs[s].size();
    for (int n = 1; n <= max_n; ++n) {
      NGramProfile h = token_ngrams(hyps[s], n);
      NGramProfile r = token_ngrams(refs[s], n);
      matched[static_cast<std::size_t>(n - 1)] += overlap(h, r);
      total[static_cast<std::size_t>(n - 1)] += h.total;
    }
  }
  if (hyp_len == 0)
    return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    std::uint64_t den = total[static_cast<std::size_t>(n - 1)];
    if (den == 0)
      continue; // every segment shorter than n
    std::uint64_t num = matched[static_cast<std::size_t>(n - 1)];
    if (num == 0)
      return 0.0;
    log_sum += std::log(static_cast<double>(num) / static_cast<double>(den));
    ++orders;
  }
  if (orders == 0)
    return 0.0;
  double bp =
      std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) /
                                       static_cast<double>(hyp_len)));
  return bp * std::exp(log_sum / orders);
}

Distribution::Distribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0))
      throw error("distribution entry " + std::to_string(p) +
                  " is negative or NaN");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw error("distribution sums to " + std::to_string(sum) + ", not 1");
}

double kl_divergence(const Distribution &p, const Distribution &q) {
  if (p.size() != q.size())
    throw error("KL divergence needs equal lengths, got " +
                std::to_string(p.size()) + " and " + std::to_string(q.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0)
      continue;
    if (q[i] == 0.0)
      return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(sum, 0.0); // guard tiny negative rounding
}

double rdrop_loss(double nll_a, double nll_b, const Distribution &p,
                  const Distribution &q, double lambda) {
  if (lambda < 0.0)
    throw error("rdrop lambda must be >= 0");
  double bidirectional = kl_divergence(p, q) + kl_divergence(q, p);
  return (nll_a + nll_b) + lambda * 0.5 * bidirectional;
}

} // namespace mtforge::metrics
