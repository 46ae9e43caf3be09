#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mtforge::dnt {

/// Which spans get masked. At least one category must be active.
struct PatternSet {
  bool urls = true;
  bool emoji = true;
  std::vector<std::string> emoticons = {":)", ":(",  ":D", ":P",
                                        ";)", ":'(", "<3", "XD"};
  std::string placeholder_prefix = "⟦DNT"; // ⟦DNT
  std::string placeholder_suffix = "⟧";    // ⟧

  void check() const;
  static PatternSet from_json(const std::string &text);
  static PatternSet load(const std::string &path);
};

struct Slot {
  std::string placeholder;
  std::string text;         // the original span
  std::size_t start = 0;    // byte offsets into the original
  std::size_t end = 0;
};

struct DntSegment {
  std::string original;
  std::string masked;
  std::vector<Slot> slots; // occurrence order, indices 1..k
};

std::string serialize(const DntSegment &seg);
DntSegment parse_segment(const std::string &line);

/// Left-to-right longest-match replacement of URLs, emoji runs, and
/// listed emoticons with numbered placeholders.
DntSegment mask(const std::string &text, const PatternSet &patterns = {});

struct UnmaskResult {
  std::string text;
  std::uint64_t lost_placeholders = 0; // slots the translation dropped
};

/// Replaces every occurrence of each slot's placeholder with its span.
/// Placeholders missing from the translation are appended at the end,
/// space-separated, and counted.
UnmaskResult unmask(const std::string &translated, const DntSegment &segment);

} // namespace mtforge::dnt
