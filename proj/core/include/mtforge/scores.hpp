#pragma once

#include "mtforge/record.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mtforge {

/// Scores keyed by (record_id, scorer). Duplicate keys are an error at
/// insert time; lookups of absent keys are simply empty.
class ScoreTable {
public:
  void insert(const ScoreRecord &rec);
  static ScoreTable from_records(const std::vector<ScoreRecord> &records);
  static ScoreTable load(const std::string &path);

  /// All scores for one record id, keyed by scorer name; nullptr if none.
  const std::map<std::string, double> *find(const std::string &record_id) const;

  /// Number of score records stored under the given id.
  std::size_t count_for(const std::string &record_id) const;

  std::size_t size() const { return total_; }

private:
  std::map<std::string, std::map<std::string, double>> by_id_;
  std::size_t total_ = 0;
};

struct AttachResult {
  std::vector<SentencePair> pairs;
  std::uint64_t orphan_scores = 0; // score records whose id matched no pair
};

/// Joins scores onto pairs by id. Order and multiplicity of pairs are
/// preserved; pairs without scores pass through untouched.
AttachResult attach_scores(std::vector<SentencePair> pairs,
                           const ScoreTable &scores);

} // namespace mtforge
