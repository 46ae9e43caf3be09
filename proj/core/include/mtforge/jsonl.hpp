#pragma once

#include "mtforge/record.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace mtforge {

enum class RecordKind { pairs, mono, hyps, scores };

RecordKind kind_from_string(std::string_view s);

/// Line-oriented reader over a file, or standard input for "-". Blank
/// lines are skipped by default (they carry no record); plain-text
/// consumers that need 1:1 line numbering pass skip_blank = false.
class LineReader {
public:
  explicit LineReader(const std::string &path, bool skip_blank = true);

  bool next(std::string &line);
  std::size_t line_number() const { return line_number_; }
  const std::string &path() const { return path_; }

private:
  std::string path_;
  std::unique_ptr<std::ifstream> file_;
  std::istream *in_;
  std::size_t line_number_ = 0;
  bool skip_blank_;
};

/// Line-oriented writer to a file, or standard output for "-".
class LineWriter {
public:
  explicit LineWriter(const std::string &path);

  void write(std::string_view line);
  void close();
  const std::string &path() const { return path_; }

private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream *out_;
};

// Streaming readers. Schema violations, duplicate ids (pairs, mono) and
// duplicate (src_id, system, method, text) tuples (hyps) throw
// mtforge::error with the path and line number.

class PairReader {
public:
  explicit PairReader(const std::string &path);
  std::optional<SentencePair> next();

private:
  LineReader lines_;
  std::unordered_set<std::string> seen_ids_;
};

class MonoReader {
public:
  explicit MonoReader(const std::string &path,
                      std::optional<Lang> expected_lang = std::nullopt);
  std::optional<MonolingualRecord> next();

private:
  LineReader lines_;
  std::optional<Lang> expected_lang_;
  std::unordered_set<std::string> seen_ids_;
};

class HypothesisReader {
public:
  explicit HypothesisReader(const std::string &path);
  std::optional<Hypothesis> next();

private:
  LineReader lines_;
  std::unordered_set<std::string> seen_tuples_;
};

class ScoreReader {
public:
  explicit ScoreReader(const std::string &path);
  std::optional<ScoreRecord> next();

private:
  LineReader lines_;
};

std::vector<SentencePair> read_pairs(const std::string &path);
std::vector<MonolingualRecord>
read_mono(const std::string &path,
          std::optional<Lang> expected_lang = std::nullopt);
std::vector<Hypothesis> read_hypotheses(const std::string &path);
std::vector<ScoreRecord> read_scores(const std::string &path);

void write_pairs(const std::string &path,
                 const std::vector<SentencePair> &records);
void write_mono(const std::string &path,
                const std::vector<MonolingualRecord> &records);
void write_hypotheses(const std::string &path,
                      const std::vector<Hypothesis> &records);
void write_scores(const std::string &path,
                  const std::vector<ScoreRecord> &records);

/// Counts records of the given kind, running full schema validation.
std::size_t validate_corpus(const std::string &path, RecordKind kind);

} // namespace mtforge
