#pragma once

#include "mtforge/manifest.hpp"
#include "mtforge/record.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mtforge::llm_data {

struct PackedSegment {
  std::string id;   // source record id
  std::string text; // possibly a truncated prefix of the source text
};

struct PackedDocument {
  std::string id;
  std::vector<PackedSegment> segments;
  std::uint64_t word_count = 0;
  bool truncated = false;
};

std::string serialize(const PackedDocument &doc);
PackedDocument parse_packed(const std::string &line);
void write_packed(const std::string &path,
                  const std::vector<PackedDocument> &docs);
std::vector<PackedDocument> read_packed(const std::string &path);

/// Greedy in-order packing under a word cap. Records sharing a doc_id
/// form a group that is kept whole whenever it fits the cap (closing the
/// current pack early if needed); oversize groups flow record by record,
/// and a single record over the cap becomes its own truncated pack. When
/// same-doc records are not adjacent in the input they are first grouped
/// by the document's first appearance, original order within.
std::vector<PackedDocument> pack_cpt(const std::vector<MonolingualRecord> &records,
                                     std::uint64_t cap_words = 4096);

/// Keeps pairs whose "qe" score is strictly greater than the threshold;
/// missing scores drop the pair and bump a counter.
std::vector<SentencePair> filter_sft(std::vector<SentencePair> pairs,
                                     double threshold = 0.8,
                                     CorpusManifest *manifest = nullptr);

struct PreferenceTriplet {
  std::string src_id;
  std::string source;
  std::string preferred;
  double preferred_score = 0.0;
  std::string dispreferred;
  double dispreferred_score = 0.0;
};

std::string serialize(const PreferenceTriplet &t);
PreferenceTriplet parse_triplet(const std::string &line);
void write_triplets(const std::string &path,
                    const std::vector<PreferenceTriplet> &triplets);
std::vector<PreferenceTriplet> read_triplets(const std::string &path);

/// Per src_id (in first appearance order): preferred = highest-scoring
/// hypothesis (ties to the lexicographically smaller text), dispreferred
/// = lowest-scoring among the remaining texts (ties to the larger text).
/// Pools whose hypotheses are all textually identical are skipped with a
/// counter; pools whose size differs from n_expected still emit a
/// triplet but are counted.
std::vector<PreferenceTriplet>
build_cpo_triplets(const std::vector<SentencePair> &sources,
                   const std::vector<Hypothesis> &hyps,
                   std::size_t n_expected = 10,
                   CorpusManifest *manifest = nullptr);

enum class TemplateStage { cpt, sft, cpo };

std::string to_string(TemplateStage s);
TemplateStage template_stage_from_string(std::string_view s);

/// Text with {src} / {tgt} / {src_lang} / {tgt_lang} placeholders;
/// doubled braces escape literal braces.
struct PromptTemplate {
  TemplateStage stage = TemplateStage::sft;
  std::string text;

  void check() const; // placeholder set; sft/cpo must use {src}
  std::vector<std::string> placeholders() const;
  static PromptTemplate load(const std::string &path, TemplateStage stage);
};

/// Substitutes placeholders from the given values; an unbound
/// placeholder is an error naming it.
std::string render(const PromptTemplate &tmpl,
                   const std::map<std::string, std::string> &values);

/// Values for rendering a sentence pair: src, tgt, src_lang, tgt_lang.
std::map<std::string, std::string> render_values(const SentencePair &pair,
                                                 const std::string &src_lang,
                                                 const std::string &tgt_lang);

} // namespace mtforge::llm_data
