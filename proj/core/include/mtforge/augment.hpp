#pragma once

#include "mtforge/manifest.hpp"
#include "mtforge/record.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mtforge::augment {

struct BatchItem {
  std::string src_id;
  std::string text; // the translation
};

/// Externally produced translations of a known set of records. src_id
/// values are unique; files use the hypothesis record format.
struct TranslationBatch {
  std::string system; // batch label: "forward", "backward", a model name
  GenMethod method = GenMethod::beam;
  std::vector<BatchItem> items;

  const std::string *find(const std::string &src_id) const;
  static TranslationBatch from_hypotheses(std::string system,
                                          const std::vector<Hypothesis> &hyps);
  static TranslationBatch load(const std::string &path, std::string system);
};

/// Adds each pair's origin to the manifest origin tally.
void count_origins(const std::vector<SentencePair> &pairs,
                   CorpusManifest &manifest);

/// Emits (s,t) then (t,s) for every input pair; reversed copies get an
/// id suffix and a direction marker in meta. Output is exactly 2x input.
std::vector<SentencePair> bit_reconstruct(const std::vector<SentencePair> &pairs);

/// original + (src, forward translation) + (backward translation, tgt),
/// synthetics tagged diversified; synthetics duplicating an original
/// (src, tgt) are dropped (count in manifest).
std::vector<SentencePair> dd_merge(const std::vector<SentencePair> &original,
                                   const TranslationBatch &forward,
                                   const TranslationBatch &backward,
                                   CorpusManifest *manifest = nullptr);

/// Synthetic (mono text, translation) pairs tagged forward_synthetic,
/// followed by the authentic pairs.
std::vector<SentencePair> ft_build(const std::vector<MonolingualRecord> &mono,
                                   const TranslationBatch &translations,
                                   const std::vector<SentencePair> &authentic);

/// Uniform sample of min(n, |mono|) records without replacement, input
/// order preserved. Deterministic for a fixed seed, independent of
/// sharding (priorities depend only on seed and record id).
std::vector<MonolingualRecord>
mono_sample(const std::vector<MonolingualRecord> &mono, std::size_t n,
            std::uint64_t seed);

/// Prefixes every src with tag + " ". Input must be backward_synthetic
/// and not already tagged; the tag is recorded in the manifest notes.
std::vector<SentencePair> bt_tag(std::vector<SentencePair> synthetic,
                                 const std::string &tag = "<BT>",
                                 CorpusManifest *manifest = nullptr);

enum class PhaseKind { synthetic, authentic };

std::string to_string(PhaseKind k);
PhaseKind phase_kind_from_string(std::string_view s);

struct Phase {
  PhaseKind kind = PhaseKind::synthetic;
  std::uint64_t steps = 0;
};

struct AlternationSchedule {
  std::vector<Phase> phases;

  std::uint64_t total_steps() const;
  void check() const; // alternation + positive step counts
  void save(const std::string &path) const; // one phase record per line
  static AlternationSchedule load(const std::string &path);
};

AlternationSchedule at_schedule(std::uint64_t total_steps,
                                std::uint64_t synthetic_len,
                                std::uint64_t authentic_len,
                                PhaseKind start_with);

/// Cartesian product: one pair per (test source, model), source-major,
/// origin tel_synthetic with the model name in meta.
std::vector<SentencePair>
tel_build(const std::vector<MonolingualRecord> &test_sources,
          const std::vector<TranslationBatch> &model_outputs);

} // namespace mtforge::augment
