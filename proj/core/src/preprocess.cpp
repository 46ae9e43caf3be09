#include "mtforge/preprocess.hpp"

#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/parallel.hpp"
#include "mtforge/text.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>
#include <unordered_set>

namespace mtforge::preprocess {

using nlohmann::json;

void FilterConfig::check() const {
  if (max_words < 1)
    throw error("max_words must be >= 1, got " + std::to_string(max_words));
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(similarity_threshold))
    throw error("similarity_threshold must be in [0,1]");
  if (langid_threshold && !in_unit(*langid_threshold))
    throw error("langid_threshold must be in [0,1]");
  if (expected_src_lang && expected_src_lang->empty())
    throw error("expected_src_lang is empty");
  if (expected_tgt_lang && expected_tgt_lang->empty())
    throw error("expected_tgt_lang is empty");
  if (subword_vocab_size && *subword_vocab_size < 1)
    throw error("subword_vocab_size must be >= 1");
}

FilterConfig FilterConfig::from_json(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("filter config is not a valid object");
  FilterConfig cfg;
  for (const auto &[key, value] : j.items()) {
    if (key == "max_words")
      cfg.max_words = value.get<int>();
    else if (key == "similarity_threshold")
      cfg.similarity_threshold = value.get<double>();
    else if (key == "langid_threshold")
      cfg.langid_threshold = value.get<double>();
    else if (key == "align_threshold")
      cfg.align_threshold = value.get<double>();
    else if (key == "expected_src_lang")
      cfg.expected_src_lang = value.get<std::string>();
    else if (key == "expected_tgt_lang")
      cfg.expected_tgt_lang = value.get<std::string>();
    else if (key == "segment_command")
      cfg.segment_command = value.get<std::string>();
    else if (key == "normpunct_command")
      cfg.normpunct_command = value.get<std::string>();
    else if (key == "subword_vocab_size")
      cfg.subword_vocab_size = value.get<int>();
    else
      throw error("unknown filter config key \"" + key + "\"");
  }
  cfg.check();
  return cfg;
}

FilterConfig FilterConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

const std::vector<std::string> kStageNames = {
    "dedup", "normwidth", "segment", "normpunct",
    "lang",  "len",       "align",   "sim"};

bool known_stage(const std::string &name) {
  for (const std::string &s : kStageNames)
    if (s == name)
      return true;
  return false;
}

/// Keeps pairs where pred is true, evaluating pred shard-parallel.
template <typename Pred>
std::vector<SentencePair> keep_where(std::vector<SentencePair> pairs,
                                     unsigned shards, Pred pred) {
  std::vector<char> keep =
      parallel_map(pairs, [&](const SentencePair &p) -> char {
        return pred(p) ? 1 : 0;
      }, shards);
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (keep[i])
      out.push_back(std::move(pairs[i]));
  return out;
}

/// Score lookup that treats absence as a drop and counts it.
bool score_at_least(const SentencePair &p, const std::string &scorer,
                    double threshold, std::atomic<std::uint64_t> &missing) {
  auto it = p.scores.find(scorer);
  if (it == p.scores.end()) {
    ++missing;
    return false;
  }
  return it->second >= threshold;
}

} // namespace

std::vector<std::string> parse_stage_list(const std::string &csv) {
  std::vector<std::string> stages;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string name = csv.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    name = std::string(text::trim(name));
    if (!name.empty()) {
      if (!known_stage(name))
        throw error("unknown stage \"" + name + "\"");
      stages.push_back(name);
    }
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  if (stages.empty())
    throw error("empty stage list");
  return stages;
}

std::vector<SentencePair> dedup_pairs(std::vector<SentencePair> pairs) {
  std::unordered_set<std::string> seen;
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  for (SentencePair &p : pairs) {
    std::string key = p.src + '\x1f' + p.tgt;
    if (seen.insert(std::move(key)).second)
      out.push_back(std::move(p));
  }
  return out;
}

std::vector<SentencePair> normalize_pairs(std::vector<SentencePair> pairs,
                                          unsigned shards) {
  std::vector<std::pair<std::string, std::string>> mapped =
      parallel_map(pairs, [](const SentencePair &p) {
        return std::pair<std::string, std::string>(
            text::normalize_width(p.src), text::normalize_width(p.tgt));
      }, shards);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pairs[i].src = std::move(mapped[i].first);
    pairs[i].tgt = std::move(mapped[i].second);
  }
  return pairs;
}

std::vector<SentencePair> filter_length(std::vector<SentencePair> pairs,
                                        const FilterConfig &cfg,
                                        unsigned shards) {
  std::size_t cap = static_cast<std::size_t>(cfg.max_words);
  return keep_where(std::move(pairs), shards, [cap](const SentencePair &p) {
    return text::count_words(p.src) <= cap && text::count_words(p.tgt) <= cap;
  });
}

std::vector<SentencePair> filter_language(std::vector<SentencePair> pairs,
                                          const FilterConfig &cfg,
                                          CorpusManifest *manifest,
                                          unsigned shards) {
  if (!cfg.langid_threshold)
    throw error("lang stage needs langid_threshold in config");
  double t = *cfg.langid_threshold;
  std::atomic<std::uint64_t> missing{0};
  auto out = keep_where(std::move(pairs), shards, [&](const SentencePair &p) {
    return score_at_least(p, "langid_src", t, missing) &&
           score_at_least(p, "langid_tgt", t, missing);
  });
  if (manifest && missing > 0)
    manifest->bump("lang_missing_score", missing);
  return out;
}

std::vector<SentencePair> filter_alignment(std::vector<SentencePair> pairs,
                                           const FilterConfig &cfg,
                                           CorpusManifest *manifest,
                                           unsigned shards) {
  if (!cfg.align_threshold)
    throw error("align stage needs align_threshold in config");
  double t = *cfg.align_threshold;
  std::atomic<std::uint64_t> missing{0};
  auto out = keep_where(std::move(pairs), shards, [&](const SentencePair &p) {
    return score_at_least(p, "align", t, missing);
  });
  if (manifest && missing > 0)
    manifest->bump("align_missing_score", missing);
  return out;
}

std::vector<SentencePair> filter_similarity(std::vector<SentencePair> pairs,
                                            const FilterConfig &cfg,
                                            CorpusManifest *manifest,
                                            unsigned shards) {
  double t = cfg.similarity_threshold;
  std::atomic<std::uint64_t> missing{0};
  auto out = keep_where(std::move(pairs), shards, [&](const SentencePair &p) {
    return score_at_least(p, "similarity", t, missing);
  });
  if (manifest && missing > 0)
    manifest->bump("sim_missing_score", missing);
  return out;
}

namespace {

/// Round-trips records through an external command via temp files.
std::vector<SentencePair> run_external(const std::vector<SentencePair> &pairs,
                                       const std::string &command,
                                       const std::string &stage) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> serial{0};
  std::string token = std::to_string(::getpid()) + "." +
                      std::to_string(serial.fetch_add(1));
  fs::path in_path = fs::temp_directory_path() / ("mtforge." + token + ".in");
  fs::path out_path = fs::temp_directory_path() / ("mtforge." + token + ".out");
  write_pairs(in_path.string(), pairs);
  std::string shell_cmd =
      command + " < '" + in_path.string() + "' > '" + out_path.string() + "'";
  int status = std::system(shell_cmd.c_str());
  if (status != 0) {
    fs::remove(in_path);
    fs::remove(out_path);
    throw error("stage \"" + stage + "\" command failed with status " +
                std::to_string(status));
  }
  std::vector<SentencePair> out = read_pairs(out_path.string());
  fs::remove(in_path);
  fs::remove(out_path);
  if (out.size() != pairs.size())
    throw error("stage \"" + stage + "\" changed the record count from " +
                std::to_string(pairs.size()) + " to " +
                std::to_string(out.size()));
  return out;
}

} // namespace

std::vector<SentencePair> run_chain(std::vector<SentencePair> pairs,
                                    const FilterConfig &cfg,
                                    const std::vector<std::string> &stages,
                                    CorpusManifest &manifest, unsigned shards) {
  cfg.check();
  if (cfg.subword_vocab_size)
    manifest.counters["subword_vocab_size"] =
        static_cast<std::uint64_t>(*cfg.subword_vocab_size);
  for (const std::string &stage : stages) {
    std::uint64_t in = pairs.size();
    if (stage == "dedup") {
      pairs = dedup_pairs(std::move(pairs));
    } else if (stage == "normwidth") {
      pairs = normalize_pairs(std::move(pairs), shards);
    } else if (stage == "segment") {
      if (!cfg.segment_command)
        throw error("stage \"segment\" needs segment_command in config");
      pairs = run_external(pairs, *cfg.segment_command, stage);
    } else if (stage == "normpunct") {
      if (!cfg.normpunct_command)
        throw error("stage \"normpunct\" needs normpunct_command in config");
      pairs = run_external(pairs, *cfg.normpunct_command, stage);
    } else if (stage == "lang") {
      pairs = filter_language(std::move(pairs), cfg, &manifest, shards);
    } else if (stage == "len") {
      pairs = filter_length(std::move(pairs), cfg, shards);
    } else if (stage == "align") {
      pairs = filter_alignment(std::move(pairs), cfg, &manifest, shards);
    } else if (stage == "sim") {
      pairs = filter_similarity(std::move(pairs), cfg, &manifest, shards);
    } else {
      throw error("unknown stage \"" + stage + "\"");
    }
    manifest.add_stage(stage, StageKind::filter, in, pairs.size());
  }
  for (const SentencePair &p : pairs)
    ++manifest.origin_counts[std::string(to_string(p.origin))];
  manifest.check();
  return pairs;
}

} // namespace mtforge::preprocess
