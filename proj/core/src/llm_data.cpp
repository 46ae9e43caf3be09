#include "mtforge/llm_data.hpp"

#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/text.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mtforge::llm_data {

using nlohmann::json;

std::string serialize(const PackedDocument &doc) {
  json segments = json::array();
  for (const PackedSegment &seg : doc.segments)
    segments.push_back({{"id", seg.id}, {"text", seg.text}});
  json j{{"id", doc.id},
         {"segments", std::move(segments)},
         {"word_count", doc.word_count},
         {"truncated", doc.truncated}};
  return j.dump();
}

PackedDocument parse_packed(const std::string &line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("not a valid record");
  for (const auto &[key, _] : j.items())
    if (key != "id" && key != "segments" && key != "word_count" &&
        key != "truncated")
      throw error("unknown field \"" + key + "\"");
  PackedDocument doc;
  doc.id = j.at("id").get<std::string>();
  for (const auto &seg : j.at("segments"))
    doc.segments.push_back({seg.at("id").get<std::string>(),
                            seg.at("text").get<std::string>()});
  doc.word_count = j.at("word_count").get<std::uint64_t>();
  doc.truncated = j.at("truncated").get<bool>();
  return doc;
}

void write_packed(const std::string &path,
                  const std::vector<PackedDocument> &docs) {
  LineWriter w(path);
  for (const PackedDocument &doc : docs)
    w.write(serialize(doc));
  w.close();
}

std::vector<PackedDocument> read_packed(const std::string &path) {
  LineReader lines(path);
  std::vector<PackedDocument> docs;
  std::string line;
  while (lines.next(line)) {
    try {
      docs.push_back(parse_packed(line));
    } catch (const std::exception &e) {
      throw error(path + " line " + std::to_string(lines.line_number()) +
                  ": " + e.what());
    }
  }
  return docs;
}

namespace {

/// Maximal runs of records sharing a doc_id; doc-less records are
/// singleton groups.
std::vector<std::pair<std::size_t, std::size_t>>
group_runs(const std::vector<MonolingualRecord> &records) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i + 1;
    if (records[i].doc_id)
      while (j < records.size() && records[j].doc_id &&
             *records[j].doc_id == *records[i].doc_id)
        ++j;
    runs.emplace_back(i, j);
    i = j;
  }
  return runs;
}

bool doc_groups_adjacent(const std::vector<MonolingualRecord> &records) {
  std::unordered_set<std::string> closed;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].doc_id)
      continue;
    const std::string &doc = *records[i].doc_id;
    if (i == 0 || !records[i - 1].doc_id || *records[i - 1].doc_id != doc) {
      if (closed.count(doc))
        return false;
      closed.insert(doc);
    }
  }
  return true;
}

/// Stable grouping by each document's first appearance; order within a
/// document and among doc-less records is untouched.
std::vector<MonolingualRecord>
group_by_first_seen(std::vector<MonolingualRecord> records) {
  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].doc_id)
      first_seen.emplace(*records[i].doc_id, i);
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     std::size_t ra = records[a].doc_id
                                          ? first_seen[*records[a].doc_id]
                                          : a;
                     std::size_t rb = records[b].doc_id
                                          ? first_seen[*records[b].doc_id]
                                          : b;
                     return ra < rb;
                   });
  std::vector<MonolingualRecord> out;
  out.reserve(records.size());
  for (std::size_t i : order)
    out.push_back(std::move(records[i]));
  return out;
}

} // namespace

std::vector<PackedDocument>
pack_cpt(const std::vector<MonolingualRecord> &records,
         std::uint64_t cap_words) {
  if (cap_words < 1)
    throw error("cap_words must be >= 1");
  std::vector<MonolingualRecord> ordered;
  const std::vector<MonolingualRecord> *input = &records;
  if (!doc_groups_adjacent(records)) {
    ordered = group_by_first_seen(records);
    input = &ordered;
  }

  std::vector<PackedDocument> packs;
  PackedDocument current;
  auto close_current = [&] {
    if (!current.segments.empty()) {
      current.id = "pack-" + std::to_string(packs.size() + 1);
      packs.push_back(std::move(current));
      current = {};
    }
  };
  auto add_record = [&](const MonolingualRecord &rec, std::uint64_t words) {
    if (words > cap_words) {
      close_current();
      PackedDocument solo;
      solo.segments.push_back(
          {rec.id, std::string(text::truncate_words(rec.text, cap_words))});
      solo.word_count = cap_words;
      solo.truncated = true;
      solo.id = "pack-" + std::to_string(packs.size() + 1);
      packs.push_back(std::move(solo));
      return;
    }
    if (current.word_count + words > cap_words)
      close_current();
    current.segments.push_back({rec.id, rec.text});
    current.word_count += words;
  };

  for (auto [start, end] : group_runs(*input)) {
    std::uint64_t group_words = 0;
    for (std::size_t i = start; i < end; ++i)
      group_words += text::count_words((*input)[i].text);
    if (group_words <= cap_words &&
        current.word_count + group_words > cap_words)
      close_current(); // keep the whole document in one pack
    for (std::size_t i = start; i < end; ++i)
      add_record((*input)[i], text::count_words((*input)[i].text));
  }
  close_current();
  return packs;
}

std::vector<SentencePair> filter_sft(std::vector<SentencePair> pairs,
                                     double threshold,
                                     CorpusManifest *manifest) {
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  std::uint64_t missing = 0;
  for (SentencePair &p : pairs) {
    auto it = p.scores.find("qe");
    if (it == p.scores.end()) {
      ++missing;
      continue;
    }
    if (it->second > threshold)
      out.push_back(std::move(p));
  }
  if (manifest && missing > 0)
    manifest->bump("qe_missing_score", missing);
  return out;
}

std::string serialize(const PreferenceTriplet &t) {
  json j{{"src_id", t.src_id},
         {"source", t.source},
         {"preferred", t.preferred},
         {"preferred_score", t.preferred_score},
         {"dispreferred", t.dispreferred},
         {"dispreferred_score", t.dispreferred_score}};
  return j.dump();
}

PreferenceTriplet parse_triplet(const std::string &line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("not a valid record");
  static const char *kKeys[] = {"src_id",       "source",
                                "preferred",    "preferred_score",
                                "dispreferred", "dispreferred_score"};
  for (const auto &[key, _] : j.items()) {
    bool known = false;
    for (const char *k : kKeys)
      known = known || key == k;
    if (!known)
      throw error("unknown field \"" + key + "\"");
  }
  for (const char *k : kKeys)
    if (!j.contains(k))
      throw error("triplet missing field \"" + std::string(k) + "\"");
  PreferenceTriplet t;
  t.src_id = j.at("src_id").get<std::string>();
  t.source = j.at("source").get<std::string>();
  t.preferred = j.at("preferred").get<std::string>();
  t.preferred_score = j.at("preferred_score").get<double>();
  t.dispreferred = j.at("dispreferred").get<std::string>();
  t.dispreferred_score = j.at("dispreferred_score").get<double>();
  if (t.preferred == t.dispreferred)
    throw error("triplet for \"" + t.src_id +
                "\" has identical preferred and dispreferred texts");
  if (t.preferred_score < t.dispreferred_score)
    throw error("triplet for \"" + t.src_id +
                "\" has preferred_score below dispreferred_score");
  return t;
}

void write_triplets(const std::string &path,
                    const std::vector<PreferenceTriplet> &triplets) {
  LineWriter w(path);
  for (const PreferenceTriplet &t : triplets)
    w.write(serialize(t));
  w.close();
}

std::vector<PreferenceTriplet> read_triplets(const std::string &path) {
  LineReader lines(path);
  std::vector<PreferenceTriplet> out;
  std::string line;
  while (lines.next(line)) {
    try {
      out.push_back(parse_triplet(line));
    } catch (const std::exception &e) {
      throw error(path + " line " + std::to_string(lines.line_number()) +
                  ": " + e.what());
    }
  }
  return out;
}

std::vector<PreferenceTriplet>
build_cpo_triplets(const std::vector<SentencePair> &sources,
                   const std::vector<Hypothesis> &hyps,
                   std::size_t n_expected, CorpusManifest *manifest) {
  std::unordered_map<std::string, const SentencePair *> by_id;
  for (const SentencePair &p : sources)
    by_id.emplace(p.id, &p);

  // Group hypotheses by src_id in first-appearance order.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const Hypothesis *>> pools;
  for (const Hypothesis &h : hyps) {
    if (!by_id.count(h.src_id))
      throw error("hypothesis references unknown src_id \"" + h.src_id +
                  "\"");
    auto [it, inserted] = pools.emplace(
        h.src_id, std::vector<const Hypothesis *>{});
    if (inserted)
      order.push_back(h.src_id);
    it->second.push_back(&h);
  }

  std::uint64_t identical = 0, size_mismatch = 0;
  std::vector<PreferenceTriplet> out;
  for (const std::string &src_id : order) {
    const std::vector<const Hypothesis *> &pool = pools[src_id];
    for (const Hypothesis *h : pool)
      if (!h->score)
        throw error("hypothesis for \"" + src_id + "\" (\"" + h->text +
                    "\") has no score");
    if (pool.size() < 2)
      throw error("src_id \"" + src_id + "\" has " +
                  std::to_string(pool.size()) +
                  " hypotheses, need at least 2");
    if (pool.size() != n_expected)
      ++size_mismatch;

    const Hypothesis *best = pool[0];
    for (const Hypothesis *h : pool)
      if (*h->score > *best->score ||
          (*h->score == *best->score && h->text < best->text))
        best = h;

    const Hypothesis *worst = nullptr;
    for (const Hypothesis *h : pool) {
      if (h->text == best->text)
        continue;
      if (!worst || *h->score < *worst->score ||
          (*h->score == *worst->score && h->text > worst->text))
        worst = h;
    }
    if (!worst) { // every hypothesis text equals the best text
      ++identical;
      continue;
    }
    out.push_back({src_id, by_id[src_id]->src, best->text, *best->score,
                   worst->text, *worst->score});
  }
  if (manifest) {
    if (identical > 0)
      manifest->bump("cpo_identical_pools", identical);
    if (size_mismatch > 0)
      manifest->bump("cpo_pool_size_mismatch", size_mismatch);
  }
  return out;
}

std::string to_string(TemplateStage s) {
  switch (s) {
  case TemplateStage::cpt:
    return "cpt";
  case TemplateStage::sft:
    return "sft";
  case TemplateStage::cpo:
    return "cpo";
  }
  throw error("bad template stage");
}

TemplateStage template_stage_from_string(std::string_view s) {
  if (s == "cpt")
    return TemplateStage::cpt;
  if (s == "sft")
    return TemplateStage::sft;
  if (s == "cpo")
    return TemplateStage::cpo;
  throw error("unknown template stage \"" + std::string(s) + "\"");
}

namespace {

const std::unordered_set<std::string> kPlaceholders = {"src", "tgt",
                                                       "src_lang", "tgt_lang"};

/// Walks the template, calling on_literal for plain spans and
/// on_placeholder for each {name}; doubled braces become literals.
template <typename Lit, typename Ph>
void scan_template(const std::string &text, Lit on_literal, Ph on_placeholder) {
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '{') {
      if (i + 1 < text.size() && text[i + 1] == '{') {
        on_literal("{");
        i += 2;
        continue;
      }
      std::size_t close = text.find('}', i + 1);
      if (close == std::string::npos)
        throw error("unclosed placeholder at offset " + std::to_string(i));
      std::string name = text.substr(i + 1, close - i - 1);
      on_placeholder(name);
      i = close + 1;
      continue;
    }
    if (c == '}') {
      if (i + 1 < text.size() && text[i + 1] == '}') {
        on_literal("}");
        i += 2;
        continue;
      }
      throw error("stray '}' at offset " + std::to_string(i));
    }
    std::size_t next = text.find_first_of("{}", i);
    if (next == std::string::npos)
      next = text.size();
    on_literal(text.substr(i, next - i));
    i = next;
  }
}

} // namespace

void PromptTemplate::check() const {
  bool has_src = false;
  scan_template(
      text, [](const std::string &) {},
      [&](const std::string &name) {
        if (!kPlaceholders.count(name))
          throw error("unknown placeholder {" + name + "}");
        if (name == "src")
          has_src = true;
      });
  if ((stage == TemplateStage::sft || stage == TemplateStage::cpo) && !has_src)
    throw error(std::string(to_string(stage)) +
                " template must contain {src}");
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  scan_template(
      text, [](const std::string &) {},
      [&](const std::string &name) { out.push_back(name); });
  return out;
}

PromptTemplate PromptTemplate::load(const std::string &path,
                                    TemplateStage stage) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  PromptTemplate tmpl;
  tmpl.stage = stage;
  tmpl.text = buf.str();
  // Strip one trailing newline so templates can end with a newline in
  // the file without it leaking into every rendered sample.
  if (!tmpl.text.empty() && tmpl.text.back() == '\n')
    tmpl.text.pop_back();
  tmpl.check();
  return tmpl;
}

std::string render(const PromptTemplate &tmpl,
                   const std::map<std::string, std::string> &values) {
  std::string out;
  scan_template(
      tmpl.text, [&](const std::string &lit) { out += lit; },
      [&](const std::string &name) {
        auto it = values.find(name);
        if (it == values.end())
          throw error("unbound placeholder {" + name + "}");
        out += it->second;
      });
  return out;
}

std::map<std::string, std::string> render_values(const SentencePair &pair,
                                                 const std::string &src_lang,
                                                 const std::string &tgt_lang) {
  return {{"src", pair.src},
          {"tgt", pair.tgt},
          {"src_lang", src_lang},
          {"tgt_lang", tgt_lang}};
}

} // namespace mtforge::llm_data
