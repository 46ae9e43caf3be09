#pragma once

#include "mtforge/manifest.hpp"
#include "mtforge/record.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mtforge::preprocess {

struct FilterConfig {
  int max_words = 150;
  double similarity_threshold = 0.7;
  std::optional<double> langid_threshold;  // required by the lang stage
  std::optional<double> align_threshold;   // required by the align stage
  std::optional<std::string> expected_src_lang;
  std::optional<std::string> expected_tgt_lang;
  std::optional<std::string> segment_command;  // required by segment
  std::optional<std::string> normpunct_command; // required by normpunct
  std::optional<int> subword_vocab_size; // recorded in the manifest only

  void check() const;
  static FilterConfig from_json(const std::string &text);
  static FilterConfig load(const std::string &path);
};

/// Splits a comma-separated stage list and rejects unknown stage names.
std::vector<std::string> parse_stage_list(const std::string &csv);

/// Drops exact (src, tgt) duplicates, keeping the first occurrence. Pairs
/// sharing a src with different tgt all survive.
std::vector<SentencePair> dedup_pairs(std::vector<SentencePair> pairs);

/// Full-width to half-width on both sides of every pair.
std::vector<SentencePair> normalize_pairs(std::vector<SentencePair> pairs,
                                          unsigned shards = 1);

std::vector<SentencePair> filter_length(std::vector<SentencePair> pairs,
                                        const FilterConfig &cfg,
                                        unsigned shards = 1);

/// Keeps pairs whose langid_src and langid_tgt scores both reach the
/// threshold; missing scores drop the pair and bump a manifest counter.
std::vector<SentencePair> filter_language(std::vector<SentencePair> pairs,
                                          const FilterConfig &cfg,
                                          CorpusManifest *manifest = nullptr,
                                          unsigned shards = 1);

std::vector<SentencePair> filter_alignment(std::vector<SentencePair> pairs,
                                           const FilterConfig &cfg,
                                           CorpusManifest *manifest = nullptr,
                                           unsigned shards = 1);

std::vector<SentencePair> filter_similarity(std::vector<SentencePair> pairs,
                                            const FilterConfig &cfg,
                                            CorpusManifest *manifest = nullptr,
                                            unsigned shards = 1);

/// Applies the named stages in order, recording per-stage in/out counts.
/// Stage names: dedup, normwidth, segment, normpunct, lang, len, align,
/// sim. The segment and normpunct stages shell out to the configured
/// external command with records on stdin/stdout.
std::vector<SentencePair> run_chain(std::vector<SentencePair> pairs,
                                    const FilterConfig &cfg,
                                    const std::vector<std::string> &stages,
                                    CorpusManifest &manifest,
                                    unsigned shards = 1);

} // namespace mtforge::preprocess
