#include "mtforge/manifest.hpp"

#include "mtforge/error.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace mtforge {

using nlohmann::json;

std::string to_string(StageKind k) {
  return k == StageKind::filter ? "filter" : "augment";
}

StageKind stage_kind_from_string(std::string_view s) {
  if (s == "filter")
    return StageKind::filter;
  if (s == "augment")
    return StageKind::augment;
  throw error("unknown stage kind \"" + std::string(s) + "\"");
}

void CorpusManifest::add_stage(const std::string &name, StageKind kind,
                               std::uint64_t in, std::uint64_t out) {
  stages.push_back({name, kind, in, out});
}

void CorpusManifest::bump(const std::string &counter, std::uint64_t by) {
  counters[counter] += by;
}

void CorpusManifest::check() const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const StageEntry &s = stages[i];
    if (s.kind == StageKind::filter && s.out > s.in)
      throw error("filter stage \"" + s.name + "\" grew from " +
                  std::to_string(s.in) + " to " + std::to_string(s.out));
    if (s.kind == StageKind::augment && s.out < s.in)
      throw error("augment stage \"" + s.name + "\" shrank from " +
                  std::to_string(s.in) + " to " + std::to_string(s.out));
    if (i + 1 < stages.size() && stages[i + 1].in != s.out)
      throw error("stage \"" + stages[i + 1].name + "\" consumed " +
                  std::to_string(stages[i + 1].in) + " records but \"" +
                  s.name + "\" produced " + std::to_string(s.out));
  }
}

std::string CorpusManifest::to_json() const {
  json j;
  j["origin_counts"] = json::object();
  for (const auto &[origin, n] : origin_counts)
    j["origin_counts"][origin] = n;
  j["stages"] = json::array();
  for (const StageEntry &s : stages)
    j["stages"].push_back({{"name", s.name},
                           {"kind", to_string(s.kind)},
                           {"in", s.in},
                           {"out", s.out}});
  j["counters"] = json::object();
  for (const auto &[name, n] : counters)
    j["counters"][name] = n;
  j["notes"] = json::object();
  for (const auto &[name, value] : notes)
    j["notes"][name] = value;
  return j.dump(2);
}

CorpusManifest CorpusManifest::from_json(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("manifest is not a valid object");
  CorpusManifest m;
  if (j.contains("origin_counts"))
    for (const auto &[origin, n] : j.at("origin_counts").items())
      m.origin_counts[origin] = n.get<std::uint64_t>();
  if (j.contains("stages"))
    for (const auto &s : j.at("stages"))
      m.stages.push_back({s.at("name").get<std::string>(),
                          stage_kind_from_string(
                              s.at("kind").get<std::string>()),
                          s.at("in").get<std::uint64_t>(),
                          s.at("out").get<std::uint64_t>()});
  if (j.contains("counters"))
    for (const auto &[name, n] : j.at("counters").items())
      m.counters[name] = n.get<std::uint64_t>();
  if (j.contains("notes"))
    for (const auto &[name, value] : j.at("notes").items())
      m.notes[name] = value.get<std::string>();
  return m;
}

void CorpusManifest::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out)
    throw error("cannot open " + path + " for writing");
  out << to_json() << '\n';
  if (!out)
    throw error("write failed on " + path);
}

CorpusManifest CorpusManifest::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

} // namespace mtforge
