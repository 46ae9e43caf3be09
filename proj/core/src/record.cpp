#include "mtforge/record.hpp"

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

#include <cmath>

#include <json.hpp>

namespace mtforge {

using nlohmann::json;

std::string_view to_string(Origin o) {
  switch (o) {
  case Origin::authentic:
    return "authentic";
  case Origin::forward_synthetic:
    return "forward_synthetic";
  case Origin::backward_synthetic:
    return "backward_synthetic";
  case Origin::diversified:
    return "diversified";
  case Origin::tel_synthetic:
    return "tel_synthetic";
  }
  return "authentic";
}

std::string_view to_string(Lang l) { return l == Lang::en ? "en" : "zh"; }

std::string_view to_string(System s) {
  return s == System::nmt ? "nmt" : "llm";
}

std::string_view to_string(GenMethod m) {
  return m == GenMethod::beam ? "beam" : "sampled";
}

Origin origin_from_string(std::string_view s) {
  if (s == "authentic")
    return Origin::authentic;
  if (s == "forward_synthetic")
    return Origin::forward_synthetic;
  if (s == "backward_synthetic")
    return Origin::backward_synthetic;
  if (s == "diversified")
    return Origin::diversified;
  if (s == "tel_synthetic")
    return Origin::tel_synthetic;
  throw error("unknown origin \"" + std::string(s) + "\"");
}

Lang lang_from_string(std::string_view s) {
  if (s == "en")
    return Lang::en;
  if (s == "zh")
    return Lang::zh;
  throw error("unknown lang \"" + std::string(s) + "\"");
}

System system_from_string(std::string_view s) {
  if (s == "nmt")
    return System::nmt;
  if (s == "llm")
    return System::llm;
  throw error("unknown system \"" + std::string(s) + "\"");
}

GenMethod method_from_string(std::string_view s) {
  if (s == "beam")
    return GenMethod::beam;
  if (s == "sampled")
    return GenMethod::sampled;
  throw error("unknown method \"" + std::string(s) + "\"");
}

namespace {

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw error("record is not a JSON object");
  return j;
}

void check_keys(const json &j, std::initializer_list<const char *> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *k : allowed)
      if (it.key() == k)
        ok = true;
    if (!ok)
      throw error("unknown field \"" + it.key() + "\"");
  }
}

std::string get_string(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end())
    throw error(std::string("missing field \"") + key + "\"");
  if (!it->is_string())
    throw error(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::string get_nonempty(const json &j, const char *key) {
  std::string v = get_string(j, key);
  if (text::trim(v).empty())
    throw error(std::string("field \"") + key + "\" is empty");
  return v;
}

double get_finite(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end())
    throw error(std::string("missing field \"") + key + "\"");
  if (!it->is_number())
    throw error(std::string("field \"") + key + "\" must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v))
    throw error(std::string("field \"") + key + "\" is not finite");
  return v;
}

} // namespace

std::string serialize(const SentencePair &r) {
  json j;
  j["id"] = r.id;
  j["src"] = r.src;
  j["tgt"] = r.tgt;
  j["origin"] = to_string(r.origin);
  if (!r.scores.empty()) {
    j["scores"] = json::object();
    for (const auto &[k, v] : r.scores)
      j["scores"][k] = v;
  }
  if (!r.meta.empty()) {
    j["meta"] = json::object();
    for (const auto &[k, v] : r.meta)
      j["meta"][k] = v;
  }
  return j.dump();
}

std::string serialize(const MonolingualRecord &r) {
  json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["lang"] = to_string(r.lang);
  if (r.doc_id)
    j["doc_id"] = *r.doc_id;
  return j.dump();
}

std::string serialize(const Hypothesis &r) {
  json j;
  j["src_id"] = r.src_id;
  j["system"] = to_string(r.system);
  j["method"] = to_string(r.method);
  j["text"] = r.text;
  if (r.score)
    j["score"] = *r.score;
  return j.dump();
}

std::string serialize(const ScoreRecord &r) {
  json j;
  j["record_id"] = r.record_id;
  j["scorer"] = r.scorer;
  j["value"] = r.value;
  return j.dump();
}

SentencePair parse_pair(std::string_view line) {
  json j = parse_object(line);
  check_keys(j, {"id", "src", "tgt", "origin", "scores", "meta"});
  SentencePair r;
  r.id = get_nonempty(j, "id");
  r.src = get_nonempty(j, "src");
  r.tgt = get_nonempty(j, "tgt");
  r.origin = origin_from_string(get_string(j, "origin"));
  if (auto it = j.find("scores"); it != j.end()) {
    if (!it->is_object())
      throw error("field \"scores\" must be an object");
    for (auto s = it->begin(); s != it->end(); ++s) {
      if (!s->is_number())
        throw error("score \"" + s.key() + "\" must be a number");
      const double v = s->get<double>();
      if (!std::isfinite(v))
        throw error("score \"" + s.key() + "\" is not finite");
      r.scores[s.key()] = v;
    }
  }
  if (auto it = j.find("meta"); it != j.end()) {
    if (!it->is_object())
      throw error("field \"meta\" must be an object");
    for (auto m = it->begin(); m != it->end(); ++m) {
      if (!m->is_string())
        throw error("meta \"" + m.key() + "\" must be a string");
      r.meta[m.key()] = m->get<std::string>();
    }
  }
  return r;
}

MonolingualRecord parse_mono(std::string_view line) {
  json j = parse_object(line);
  check_keys(j, {"id", "text", "lang", "doc_id"});
  MonolingualRecord r;
  r.id = get_nonempty(j, "id");
  r.text = get_nonempty(j, "text");
  r.lang = lang_from_string(get_string(j, "lang"));
  if (j.contains("doc_id"))
    r.doc_id = get_nonempty(j, "doc_id");
  return r;
}

Hypothesis parse_hypothesis(std::string_view line) {
  json j = parse_object(line);
  check_keys(j, {"src_id", "system", "method", "text", "score"});
  Hypothesis r;
  r.src_id = get_nonempty(j, "src_id");
  r.system = system_from_string(get_string(j, "system"));
  r.method = method_from_string(get_string(j, "method"));
  r.text = get_string(j, "text");
  if (j.contains("score"))
    r.score = get_finite(j, "score");
  return r;
}

ScoreRecord parse_score(std::string_view line) {
  json j = parse_object(line);
  check_keys(j, {"record_id", "scorer", "value"});
  ScoreRecord r;
  r.record_id = get_nonempty(j, "record_id");
  r.scorer = get_nonempty(j, "scorer");
  r.value = get_finite(j, "value");
  if ((r.scorer == "similarity" || r.scorer == "qe") &&
      (r.value < 0.0 || r.value > 1.0))
    throw error("scorer \"" + r.scorer + "\" value out of [0,1]");
  return r;
}

} // namespace mtforge
