#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mtforge {

enum class StageKind { filter, augment };

std::string to_string(StageKind k);
StageKind stage_kind_from_string(std::string_view s);

struct StageEntry {
  std::string name;
  StageKind kind = StageKind::filter;
  std::uint64_t in = 0;
  std::uint64_t out = 0;
};

/// Bookkeeping emitted alongside corpus transforms: per-origin record
/// counts, per-stage in/out arithmetic, and free-form warning counters.
struct CorpusManifest {
  std::map<std::string, std::uint64_t> origin_counts;
  std::vector<StageEntry> stages;
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, std::string> notes; // e.g. the tag used by bt-tag

  void add_stage(const std::string &name, StageKind kind, std::uint64_t in,
                 std::uint64_t out);
  void bump(const std::string &counter, std::uint64_t by = 1);

  /// Throws if a filter stage grows, an augment stage shrinks, or
  /// consecutive stages disagree on the record count between them.
  void check() const;

  std::string to_json() const;
  static CorpusManifest from_json(const std::string &text);

  void save(const std::string &path) const;
  static CorpusManifest load(const std::string &path);
};

} // namespace mtforge
