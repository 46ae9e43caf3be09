#include "mtforge/curriculum.hpp"

#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/rng.hpp"
#include "mtforge/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_set>

namespace mtforge::curriculum {

using nlohmann::json;

double domain_feature(double logp_in, double logp_out, std::uint64_t tgt_len) {
  if (tgt_len < 1)
    throw error("tgt_len must be >= 1");
  if (!std::isfinite(logp_in) || !std::isfinite(logp_out))
    throw error("log-probabilities must be finite");
  return (logp_in - logp_out) / static_cast<double>(tgt_len);
}

std::string serialize(const CurriculumItem &item) {
  json j{{"pair_id", item.pair_id},
         {"q", item.q},
         {"tgt_len", item.tgt_len},
         {"bucket", item.bucket}};
  return j.dump();
}

CurriculumItem parse_curriculum_item(const std::string &line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("not a valid record");
  for (const auto &[key, _] : j.items())
    if (key != "pair_id" && key != "q" && key != "tgt_len" && key != "bucket")
      throw error("unknown field \"" + key + "\"");
  if (!j.contains("pair_id") || !j.contains("q") || !j.contains("tgt_len") ||
      !j.contains("bucket"))
    throw error("curriculum item needs pair_id, q, tgt_len, bucket");
  CurriculumItem item;
  item.pair_id = j.at("pair_id").get<std::string>();
  item.q = j.at("q").get<double>();
  item.tgt_len = j.at("tgt_len").get<std::uint64_t>();
  item.bucket = j.at("bucket").get<std::size_t>();
  if (item.pair_id.empty())
    throw error("pair_id is empty");
  if (!std::isfinite(item.q))
    throw error("q is not finite");
  if (item.tgt_len < 1)
    throw error("tgt_len must be >= 1");
  return item;
}

std::vector<CurriculumItem> read_items(const std::string &path) {
  LineReader lines(path);
  std::vector<CurriculumItem> items;
  std::unordered_set<std::string> seen;
  std::string line;
  while (lines.next(line)) {
    try {
      items.push_back(parse_curriculum_item(line));
    } catch (const std::exception &e) {
      throw error(path + " line " + std::to_string(lines.line_number()) +
                  ": " + e.what());
    }
    if (!seen.insert(items.back().pair_id).second)
      throw error(path + " line " + std::to_string(lines.line_number()) +
                  ": duplicate pair_id \"" + items.back().pair_id + "\"");
  }
  return items;
}

void write_items(const std::string &path,
                 const std::vector<CurriculumItem> &items) {
  LineWriter w(path);
  for (const CurriculumItem &item : items)
    w.write(serialize(item));
  w.close();
}

std::vector<CurriculumItem>
rank_and_bucket(const std::vector<ScoredInput> &items,
                std::size_t num_buckets) {
  if (num_buckets < 1)
    throw error("num_buckets must be >= 1");
  if (items.size() < num_buckets)
    throw error("need at least " + std::to_string(num_buckets) +
                " items for " + std::to_string(num_buckets) +
                " buckets, got " + std::to_string(items.size()));
  std::unordered_set<std::string> seen;
  std::vector<CurriculumItem> out;
  out.reserve(items.size());
  for (const ScoredInput &in : items) {
    if (!seen.insert(in.pair_id).second)
      throw error("duplicate pair_id \"" + in.pair_id + "\"");
    out.push_back({in.pair_id,
                   domain_feature(in.logp_in, in.logp_out, in.tgt_len),
                   in.tgt_len, 0});
  }
  std::sort(out.begin(), out.end(),
            [](const CurriculumItem &a, const CurriculumItem &b) {
              if (a.q != b.q)
                return a.q > b.q;
              return a.pair_id < b.pair_id;
            });
  std::size_t per_bucket = out.size() / num_buckets;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].bucket = std::min(i / per_bucket, num_buckets - 1);
  return out;
}

std::vector<ScoredInput>
inputs_from_pairs(const std::vector<SentencePair> &pairs) {
  std::vector<ScoredInput> out;
  out.reserve(pairs.size());
  for (const SentencePair &p : pairs) {
    auto logp_in = p.scores.find("logp_in");
    auto logp_out = p.scores.find("logp_out");
    if (logp_in == p.scores.end())
      throw error("pair \"" + p.id + "\" has no logp_in score");
    if (logp_out == p.scores.end())
      throw error("pair \"" + p.id + "\" has no logp_out score");
    std::size_t tgt_len = text::count_words(p.tgt);
    if (tgt_len == 0)
      throw error("pair \"" + p.id + "\" has an empty target");
    out.push_back({p.id, logp_in->second, logp_out->second, tgt_len});
  }
  return out;
}

void SamplingPlan::check() const {
  if (num_buckets < 1)
    throw error("num_buckets must be >= 1");
  if (batch_size < 1)
    throw error("batch_size must be >= 1");
  if (schedule.empty())
    throw error("schedule is empty");
  if (schedule.front().step != 0)
    throw error("schedule must start at step 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry &e = schedule[i];
    if (i > 0 && e.step <= schedule[i - 1].step)
      throw error("schedule steps must be strictly increasing");
    if (e.weights.size() != num_buckets)
      throw error("schedule entry at step " + std::to_string(e.step) +
                  " has " + std::to_string(e.weights.size()) +
                  " weights for " + std::to_string(num_buckets) + " buckets");
    double sum = 0.0;
    for (double w : e.weights) {
      if (!(w >= 0.0))
        throw error("negative weight at step " + std::to_string(e.step));
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw error("weights at step " + std::to_string(e.step) + " sum to " +
                  std::to_string(sum) + ", not 1");
  }
}

SamplingPlan SamplingPlan::from_json(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("sampling plan is not a valid object");
  SamplingPlan plan;
  for (const auto &[key, value] : j.items()) {
    if (key == "num_buckets")
      plan.num_buckets = value.get<std::size_t>();
    else if (key == "batch_size")
      plan.batch_size = value.get<std::size_t>();
    else if (key == "seed")
      plan.seed = value.get<std::uint64_t>();
    else if (key == "schedule") {
      if (!value.is_array())
        throw error("schedule must be an array");
      for (const auto &entry : value) {
        ScheduleEntry e;
        e.step = entry.at("step").get<std::uint64_t>();
        e.weights = entry.at("weights").get<std::vector<double>>();
        plan.schedule.push_back(std::move(e));
      }
    } else
      throw error("unknown plan key \"" + key + "\"");
  }
  plan.check();
  return plan;
}

SamplingPlan SamplingPlan::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::vector<Batch> sample_batches(const std::vector<CurriculumItem> &items,
                                  const SamplingPlan &plan,
                                  std::uint64_t total_steps) {
  plan.check();
  std::vector<std::vector<std::size_t>> buckets(plan.num_buckets);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].bucket >= plan.num_buckets)
      throw error("item \"" + items[i].pair_id + "\" is in bucket " +
                  std::to_string(items[i].bucket) + " of " +
                  std::to_string(plan.num_buckets));
    buckets[items[i].bucket].push_back(i);
  }
  for (const ScheduleEntry &e : plan.schedule)
    for (std::size_t b = 0; b < e.weights.size(); ++b)
      if (e.weights[b] > 0.0 && buckets[b].empty())
        throw error("schedule at step " + std::to_string(e.step) +
                    " gives weight to empty bucket " + std::to_string(b));

  rng::Engine engine(plan.seed);
  std::vector<Batch> out;
  out.reserve(total_steps);
  for (std::uint64_t step = 0; step < total_steps; ++step) {
    std::size_t active = 0;
    for (std::size_t i = 0; i < plan.schedule.size(); ++i)
      if (plan.schedule[i].step <= step)
        active = i;
    const std::vector<double> &weights = plan.schedule[active].weights;
    Batch batch;
    batch.step = step;
    batch.ids.reserve(plan.batch_size);
    for (std::size_t d = 0; d < plan.batch_size; ++d) {
      double u = engine.unit();
      double cum = 0.0;
      std::size_t chosen = 0;
      bool found = false;
      for (std::size_t b = 0; b < weights.size(); ++b) {
        cum += weights[b];
        if (u < cum) {
          chosen = b;
          found = true;
          break;
        }
      }
      if (!found) { // u landed in the last sliver of rounding error
        for (std::size_t b = weights.size(); b-- > 0;)
          if (weights[b] > 0.0) {
            chosen = b;
            break;
          }
      }
      const std::vector<std::size_t> &bucket = buckets[chosen];
      std::size_t pick = static_cast<std::size_t>(
          engine.below(static_cast<std::uint64_t>(bucket.size())));
      batch.ids.push_back(items[bucket[pick]].pair_id);
    }
    out.push_back(std::move(batch));
  }
  return out;
}

void write_batches(const std::string &path, const std::vector<Batch> &batches) {
  LineWriter w(path);
  for (const Batch &b : batches) {
    json j{{"step", b.step}, {"ids", b.ids}};
    w.write(j.dump());
  }
  w.close();
}

} // namespace mtforge::curriculum
