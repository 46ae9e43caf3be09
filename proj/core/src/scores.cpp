#include "mtforge/scores.hpp"

#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"

#include <unordered_set>

namespace mtforge {

void ScoreTable::insert(const ScoreRecord &rec) {
  auto &for_id = by_id_[rec.record_id];
  if (!for_id.emplace(rec.scorer, rec.value).second)
    throw error("duplicate score (" + rec.record_id + ", " + rec.scorer + ")");
  ++total_;
}

ScoreTable ScoreTable::from_records(const std::vector<ScoreRecord> &records) {
  ScoreTable t;
  for (const ScoreRecord &rec : records)
    t.insert(rec);
  return t;
}

ScoreTable ScoreTable::load(const std::string &path) {
  return from_records(read_scores(path));
}

const std::map<std::string, double> *
ScoreTable::find(const std::string &record_id) const {
  auto it = by_id_.find(record_id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::size_t ScoreTable::count_for(const std::string &record_id) const {
  auto it = by_id_.find(record_id);
  return it == by_id_.end() ? 0 : it->second.size();
}

AttachResult attach_scores(std::vector<SentencePair> pairs,
                           const ScoreTable &scores) {
  AttachResult res;
  std::uint64_t consumed = 0;
  std::unordered_set<std::string> seen;
  for (SentencePair &p : pairs) {
    if (const auto *for_id = scores.find(p.id)) {
      for (const auto &[scorer, value] : *for_id)
        p.scores[scorer] = value;
      if (seen.insert(p.id).second)
        consumed += for_id->size();
    }
  }
  res.orphan_scores = scores.size() - consumed;
  res.pairs = std::move(pairs);
  return res;
}

} // namespace mtforge
