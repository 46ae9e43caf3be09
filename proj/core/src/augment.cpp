#include "mtforge/augment.hpp"

#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/rng.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

namespace mtforge::augment {

const std::string *TranslationBatch::find(const std::string &src_id) const {
  for (const BatchItem &item : items)
    if (item.src_id == src_id)
      return &item.text;
  return nullptr;
}

TranslationBatch
TranslationBatch::from_hypotheses(std::string system,
                                  const std::vector<Hypothesis> &hyps) {
  TranslationBatch batch;
  batch.system = std::move(system);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const Hypothesis &h = hyps[i];
    if (!seen.insert(h.src_id).second)
      throw error("batch \"" + batch.system + "\": duplicate src_id \"" +
                  h.src_id + "\"");
    if (i == 0)
      batch.method = h.method;
    else if (h.method != batch.method)
      throw error("batch \"" + batch.system +
                  "\" mixes beam and sampled methods");
    batch.items.push_back({h.src_id, h.text});
  }
  return batch;
}

TranslationBatch TranslationBatch::load(const std::string &path,
                                        std::string system) {
  return from_hypotheses(std::move(system), read_hypotheses(path));
}

void count_origins(const std::vector<SentencePair> &pairs,
                   CorpusManifest &manifest) {
  for (const SentencePair &p : pairs)
    ++manifest.origin_counts[std::string(to_string(p.origin))];
}

std::vector<SentencePair>
bit_reconstruct(const std::vector<SentencePair> &pairs) {
  std::vector<SentencePair> out;
  out.reserve(pairs.size() * 2);
  for (const SentencePair &p : pairs) {
    out.push_back(p);
    SentencePair rev = p;
    rev.id = p.id + "#rev";
    rev.src = p.tgt;
    rev.tgt = p.src;
    rev.meta["direction"] = "reversed";
    out.push_back(std::move(rev));
  }
  return out;
}

namespace {

std::unordered_map<std::string, const std::string *>
index_batch(const TranslationBatch &batch) {
  std::unordered_map<std::string, const std::string *> index;
  index.reserve(batch.items.size());
  for (const BatchItem &item : batch.items)
    index.emplace(item.src_id, &item.text);
  return index;
}

} // namespace

std::vector<SentencePair> dd_merge(const std::vector<SentencePair> &original,
                                   const TranslationBatch &forward,
                                   const TranslationBatch &backward,
                                   CorpusManifest *manifest) {
  std::unordered_map<std::string, const SentencePair *> by_id;
  std::unordered_set<std::string> original_texts;
  for (const SentencePair &p : original) {
    by_id.emplace(p.id, &p);
    original_texts.insert(p.src + '\x1f' + p.tgt);
  }

  std::vector<SentencePair> out = original;
  std::uint64_t dropped = 0;

  auto emit = [&](const TranslationBatch &batch, bool is_forward) {
    for (const BatchItem &item : batch.items) {
      auto it = by_id.find(item.src_id);
      if (it == by_id.end())
        throw error("batch \"" + batch.system + "\": unknown src_id \"" +
                    item.src_id + "\"");
      const SentencePair &orig = *it->second;
      SentencePair syn;
      syn.id = orig.id + (is_forward ? "#fwd" : "#bwd");
      syn.src = is_forward ? orig.src : item.text;
      syn.tgt = is_forward ? item.text : orig.tgt;
      syn.origin = Origin::diversified;
      syn.meta["dd"] = is_forward ? "forward" : "backward";
      if (original_texts.count(syn.src + '\x1f' + syn.tgt)) {
        ++dropped;
        continue;
      }
      out.push_back(std::move(syn));
    }
  };
  emit(forward, true);
  emit(backward, false);

  if (manifest && dropped > 0)
    manifest->bump("dd_duplicates_dropped", dropped);
  return out;
}

std::vector<SentencePair> ft_build(const std::vector<MonolingualRecord> &mono,
                                   const TranslationBatch &translations,
                                   const std::vector<SentencePair> &authentic) {
  auto index = index_batch(translations);
  std::vector<SentencePair> out;
  out.reserve(mono.size() + authentic.size());
  for (const MonolingualRecord &rec : mono) {
    auto it = index.find(rec.id);
    if (it == index.end())
      throw error("missing translation for \"" + rec.id + "\"");
    SentencePair syn;
    syn.id = rec.id + "#ft";
    syn.src = rec.text;
    syn.tgt = *it->second;
    syn.origin = Origin::forward_synthetic;
    out.push_back(std::move(syn));
  }
  out.insert(out.end(), authentic.begin(), authentic.end());
  return out;
}

std::vector<MonolingualRecord>
mono_sample(const std::vector<MonolingualRecord> &mono, std::size_t n,
            std::uint64_t seed) {
  if (n >= mono.size())
    return mono;
  if (n == 0)
    return {};
  // Priority per record from (seed, id) only, so the bottom-n set is a
  // uniform sample that no sharding or input reordering can change.
  struct Keyed {
    std::uint64_t priority;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(mono.size());
  for (std::size_t i = 0; i < mono.size(); ++i)
    keyed.push_back(
        {rng::derive(seed, rng::fnv1a("mono_sample"), mono[i].id), i});
  auto lower = [&](const Keyed &a, const Keyed &b) {
    if (a.priority != b.priority)
      return a.priority < b.priority;
    return mono[a.index].id < mono[b.index].id;
  };
  std::nth_element(keyed.begin(), keyed.begin() + n, keyed.end(), lower);
  keyed.resize(n);
  std::sort(keyed.begin(), keyed.end(),
            [](const Keyed &a, const Keyed &b) { return a.index < b.index; });
  std::vector<MonolingualRecord> out;
  out.reserve(n);
  for (const Keyed &k : keyed)
    out.push_back(mono[k.index]);
  return out;
}

std::vector<SentencePair> bt_tag(std::vector<SentencePair> synthetic,
                                 const std::string &tag,
                                 CorpusManifest *manifest) {
  if (tag.empty())
    throw error("bt tag is empty");
  for (SentencePair &p : synthetic) {
    if (p.origin != Origin::backward_synthetic)
      throw error("pair \"" + p.id + "\" has origin " + std::string(to_string(p.origin)) +
                  ", expected backward_synthetic");
    if (p.meta.count("bt_tag"))
      throw error("pair \"" + p.id + "\" is already tagged");
    p.src = tag + " " + p.src;
    p.meta["bt_tag"] = tag;
  }
  if (manifest) {
    manifest->notes["bt_tag"] = tag;
    manifest->bump("bt_tagged", synthetic.size());
  }
  return synthetic;
}

std::string to_string(PhaseKind k) {
  return k == PhaseKind::synthetic ? "synthetic" : "authentic";
}

PhaseKind phase_kind_from_string(std::string_view s) {
  if (s == "synthetic")
    return PhaseKind::synthetic;
  if (s == "authentic")
    return PhaseKind::authentic;
  throw error("unknown phase kind \"" + std::string(s) + "\"");
}

std::uint64_t AlternationSchedule::total_steps() const {
  std::uint64_t total = 0;
  for (const Phase &p : phases)
    total += p.steps;
  return total;
}

void AlternationSchedule::check() const {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (phases[i].steps == 0)
      throw error("phase " + std::to_string(i) + " has zero steps");
    if (i > 0 && phases[i].kind == phases[i - 1].kind)
      throw error("phases " + std::to_string(i - 1) + " and " +
                  std::to_string(i) + " share kind " +
                  to_string(phases[i].kind));
  }
}

void AlternationSchedule::save(const std::string &path) const {
  LineWriter w(path);
  for (const Phase &p : phases) {
    nlohmann::json j{{"kind", to_string(p.kind)}, {"steps", p.steps}};
    w.write(j.dump());
  }
  w.close();
}

AlternationSchedule AlternationSchedule::load(const std::string &path) {
  AlternationSchedule sched;
  LineReader lines(path);
  std::string line;
  while (lines.next(line)) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("kind") ||
        !j.contains("steps"))
      throw error(path + " line " + std::to_string(lines.line_number()) +
                  ": not a phase record");
    sched.phases.push_back(
        {phase_kind_from_string(j.at("kind").get<std::string>()),
         j.at("steps").get<std::uint64_t>()});
  }
  sched.check();
  return sched;
}

AlternationSchedule at_schedule(std::uint64_t total_steps,
                                std::uint64_t synthetic_len,
                                std::uint64_t authentic_len,
                                PhaseKind start_with) {
  if (total_steps < 1)
    throw error("total_steps must be >= 1");
  if (synthetic_len < 1 || authentic_len < 1)
    throw error("phase lengths must be >= 1");
  AlternationSchedule sched;
  PhaseKind kind = start_with;
  std::uint64_t remaining = total_steps;
  while (remaining > 0) {
    std::uint64_t len =
        kind == PhaseKind::synthetic ? synthetic_len : authentic_len;
    len = std::min(len, remaining);
    sched.phases.push_back({kind, len});
    remaining -= len;
    kind = kind == PhaseKind::synthetic ? PhaseKind::authentic
                                        : PhaseKind::synthetic;
  }
  sched.check();
  return sched;
}

std::vector<SentencePair>
tel_build(const std::vector<MonolingualRecord> &test_sources,
          const std::vector<TranslationBatch> &model_outputs) {
  if (model_outputs.empty())
    throw error("tel needs at least one model batch");
  std::vector<std::unordered_map<std::string, const std::string *>> indices;
  indices.reserve(model_outputs.size());
  for (const TranslationBatch &batch : model_outputs)
    indices.push_back(index_batch(batch));

  std::vector<SentencePair> out;
  out.reserve(test_sources.size() * model_outputs.size());
  for (const MonolingualRecord &src : test_sources) {
    for (std::size_t m = 0; m < model_outputs.size(); ++m) {
      auto it = indices[m].find(src.id);
      if (it == indices[m].end())
        throw error("model \"" + model_outputs[m].system +
                    "\" has no translation for \"" + src.id + "\"");
      SentencePair syn;
      syn.id = src.id + "#" + model_outputs[m].system;
      syn.src = src.text;
      syn.tgt = *it->second;
      syn.origin = Origin::tel_synthetic;
      syn.meta["model"] = model_outputs[m].system;
      out.push_back(std::move(syn));
    }
  }
  return out;
}

} // namespace mtforge::augment
