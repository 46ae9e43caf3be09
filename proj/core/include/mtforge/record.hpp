#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace mtforge {

enum class Origin {
  authentic,
  forward_synthetic,
  backward_synthetic,
  diversified,
  tel_synthetic,
};

enum class Lang { en, zh };

enum class System { nmt, llm };

enum class GenMethod { beam, sampled };

std::string_view to_string(Origin o);
std::string_view to_string(Lang l);
std::string_view to_string(System s);
std::string_view to_string(GenMethod m);
Origin origin_from_string(std::string_view s);
Lang lang_from_string(std::string_view s);
System system_from_string(std::string_view s);
GenMethod method_from_string(std::string_view s);

/// One bilingual record. `meta` carries op-level annotations (direction
/// markers, producing model names) and is omitted from the wire format
/// when empty.
struct SentencePair {
  std::string id;
  std::string src;
  std::string tgt;
  Origin origin = Origin::authentic;
  std::map<std::string, double> scores;
  std::map<std::string, std::string> meta;

  bool operator==(const SentencePair &) const = default;
};

struct MonolingualRecord {
  std::string id;
  std::string text;
  Lang lang = Lang::en;
  std::optional<std::string> doc_id;

  bool operator==(const MonolingualRecord &) const = default;
};

/// One candidate translation from either decoding system.
struct Hypothesis {
  std::string src_id;
  System system = System::nmt;
  GenMethod method = GenMethod::beam;
  std::string text;
  std::optional<double> score;

  bool operator==(const Hypothesis &) const = default;
};

struct ScoreRecord {
  std::string record_id;
  std::string scorer;
  double value = 0.0;

  bool operator==(const ScoreRecord &) const = default;
};

// Wire format: one JSON object per line, UTF-8, keys in sorted order.
std::string serialize(const SentencePair &r);
std::string serialize(const MonolingualRecord &r);
std::string serialize(const Hypothesis &r);
std::string serialize(const ScoreRecord &r);

// Parsers throw mtforge::error naming the offending field; the jsonl
// readers prefix the line number.
SentencePair parse_pair(std::string_view line);
MonolingualRecord parse_mono(std::string_view line);
Hypothesis parse_hypothesis(std::string_view line);
ScoreRecord parse_score(std::string_view line);

} // namespace mtforge
