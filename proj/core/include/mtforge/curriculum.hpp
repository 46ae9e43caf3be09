#pragma once

#include "mtforge/record.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mtforge::curriculum {

/// (logp_in - logp_out) / tgt_len. Higher = more in-domain-like.
double domain_feature(double logp_in, double logp_out, std::uint64_t tgt_len);

struct ScoredInput {
  std::string pair_id;
  double logp_in = 0.0;
  double logp_out = 0.0;
  std::uint64_t tgt_len = 1;
};

struct CurriculumItem {
  std::string pair_id;
  double q = 0.0;
  std::uint64_t tgt_len = 1;
  std::size_t bucket = 0;
};

std::string serialize(const CurriculumItem &item);
CurriculumItem parse_curriculum_item(const std::string &line);

std::vector<CurriculumItem> read_items(const std::string &path);
void write_items(const std::string &path,
                 const std::vector<CurriculumItem> &items);

/// Computes q per item, sorts descending (ties by pair_id), and assigns
/// rank buckets: bucket 0 holds the highest-q |items|/num_buckets items,
/// the last bucket absorbs the remainder.
std::vector<CurriculumItem> rank_and_bucket(const std::vector<ScoredInput> &items,
                                            std::size_t num_buckets);

/// Builds curriculum inputs from pairs: tgt_len from target word count,
/// log-probabilities from the attached "logp_in"/"logp_out" scores
/// (missing scores are an error naming the pair).
std::vector<ScoredInput> inputs_from_pairs(const std::vector<SentencePair> &pairs);

struct ScheduleEntry {
  std::uint64_t step = 0;          // active from this step on
  std::vector<double> weights;     // one per bucket, sums to 1
};

struct SamplingPlan {
  std::size_t num_buckets = 1;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  std::vector<ScheduleEntry> schedule;

  void check() const;
  static SamplingPlan from_json(const std::string &text);
  static SamplingPlan load(const std::string &path);
};

struct Batch {
  std::uint64_t step = 0;
  std::vector<std::string> ids;
};

/// One batch per step in [0, total_steps): picks a bucket by the active
/// entry's weights, then an item uniformly within it, with replacement.
/// Deterministic for a fixed plan seed.
std::vector<Batch> sample_batches(const std::vector<CurriculumItem> &items,
                                  const SamplingPlan &plan,
                                  std::uint64_t total_steps);

void write_batches(const std::string &path, const std::vector<Batch> &batches);

} // namespace mtforge::curriculum
