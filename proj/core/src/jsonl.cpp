#include "mtforge/jsonl.hpp"

#include "mtforge/error.hpp"

namespace mtforge {

RecordKind kind_from_string(std::string_view s) {
  if (s == "pairs")
    return RecordKind::pairs;
  if (s == "mono")
    return RecordKind::mono;
  if (s == "hyps")
    return RecordKind::hyps;
  if (s == "scores")
    return RecordKind::scores;
  throw error("unknown record kind \"" + std::string(s) + "\"");
}

LineReader::LineReader(const std::string &path, bool skip_blank)
    : path_(path), skip_blank_(skip_blank) {
  if (path == "-") {
    in_ = &std::cin;
    return;
  }
  file_ = std::make_unique<std::ifstream>(path);
  if (!*file_)
    throw error("cannot open " + path);
  in_ = file_.get();
}

bool LineReader::next(std::string &line) {
  while (std::getline(*in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() && skip_blank_)
      continue; // blank lines carry no record
    return true;
  }
  return false;
}

LineWriter::LineWriter(const std::string &path) : path_(path) {
  if (path == "-") {
    out_ = &std::cout;
    return;
  }
  file_ = std::make_unique<std::ofstream>(path);
  if (!*file_)
    throw error("cannot open " + path + " for writing");
  out_ = file_.get();
}

void LineWriter::write(std::string_view line) {
  out_->write(line.data(), static_cast<std::streamsize>(line.size()));
  out_->put('\n');
  if (!*out_)
    throw error("write failed on " + path_);
}

void LineWriter::close() {
  out_->flush();
  if (file_) {
    file_->close();
    if (!*file_)
      throw error("write failed on " + path_);
  }
}

namespace {

std::string at_line(const LineReader &r, const std::string &what) {
  return r.path() + " line " + std::to_string(r.line_number()) + ": " + what;
}

template <typename Fn>
auto parse_at(LineReader &r, const std::string &line, Fn fn) {
  try {
    return fn(line);
  } catch (const std::exception &e) {
    throw error(at_line(r, e.what()));
  }
}

} // namespace

PairReader::PairReader(const std::string &path) : lines_(path) {}

std::optional<SentencePair> PairReader::next() {
  std::string line;
  if (!lines_.next(line))
    return std::nullopt;
  SentencePair rec = parse_at(lines_, line, parse_pair);
  if (!seen_ids_.insert(rec.id).second)
    throw error(at_line(lines_, "duplicate id \"" + rec.id + "\""));
  return rec;
}

MonoReader::MonoReader(const std::string &path, std::optional<Lang> expected)
    : lines_(path), expected_lang_(expected) {}

std::optional<MonolingualRecord> MonoReader::next() {
  std::string line;
  if (!lines_.next(line))
    return std::nullopt;
  MonolingualRecord rec = parse_at(lines_, line, parse_mono);
  if (!seen_ids_.insert(rec.id).second)
    throw error(at_line(lines_, "duplicate id \"" + rec.id + "\""));
  if (expected_lang_ && rec.lang != *expected_lang_)
    throw error(at_line(lines_, "record \"" + rec.id + "\" has lang " +
                                    std::string(to_string(rec.lang)) +
                                    ", expected " +
                                    std::string(to_string(*expected_lang_))));
  return rec;
}

HypothesisReader::HypothesisReader(const std::string &path) : lines_(path) {}

std::optional<Hypothesis> HypothesisReader::next() {
  std::string line;
  if (!lines_.next(line))
    return std::nullopt;
  Hypothesis rec = parse_at(lines_, line, parse_hypothesis);
  std::string key = rec.src_id + '\x1f' +
                    std::string(to_string(rec.system)) + '\x1f' +
                    std::string(to_string(rec.method)) + '\x1f' + rec.text;
  if (!seen_tuples_.insert(key).second)
    throw error(at_line(lines_, "duplicate hypothesis for src_id \"" +
                                    rec.src_id + "\""));
  return rec;
}

ScoreReader::ScoreReader(const std::string &path) : lines_(path) {}

std::optional<ScoreRecord> ScoreReader::next() {
  std::string line;
  if (!lines_.next(line))
    return std::nullopt;
  return parse_at(lines_, line, parse_score);
}

std::vector<SentencePair> read_pairs(const std::string &path) {
  PairReader r(path);
  std::vector<SentencePair> out;
  while (auto rec = r.next())
    out.push_back(std::move(*rec));
  return out;
}

std::vector<MonolingualRecord> read_mono(const std::string &path,
                                         std::optional<Lang> expected_lang) {
  MonoReader r(path, expected_lang);
  std::vector<MonolingualRecord> out;
  while (auto rec = r.next())
    out.push_back(std::move(*rec));
  return out;
}

std::vector<Hypothesis> read_hypotheses(const std::string &path) {
  HypothesisReader r(path);
  std::vector<Hypothesis> out;
  while (auto rec = r.next())
    out.push_back(std::move(*rec));
  return out;
}

std::vector<ScoreRecord> read_scores(const std::string &path) {
  ScoreReader r(path);
  std::vector<ScoreRecord> out;
  while (auto rec = r.next())
    out.push_back(std::move(*rec));
  return out;
}

namespace {

template <typename T>
void write_records(const std::string &path, const std::vector<T> &records) {
  LineWriter w(path);
  for (const T &rec : records)
    w.write(serialize(rec));
  w.close();
}

} // namespace

void write_pairs(const std::string &path,
                 const std::vector<SentencePair> &records) {
  write_records(path, records);
}

void write_mono(const std::string &path,
                const std::vector<MonolingualRecord> &records) {
  write_records(path, records);
}

void write_hypotheses(const std::string &path,
                      const std::vector<Hypothesis> &records) {
  write_records(path, records);
}

void write_scores(const std::string &path,
                  const std::vector<ScoreRecord> &records) {
  write_records(path, records);
}

std::size_t validate_corpus(const std::string &path, RecordKind kind) {
  switch (kind) {
  case RecordKind::pairs:
    return read_pairs(path).size();
  case RecordKind::mono:
    return read_mono(path).size();
  case RecordKind::hyps:
    return read_hypotheses(path).size();
  case RecordKind::scores:
    return read_scores(path).size();
  }
  throw error("unknown record kind");
}

} // namespace mtforge
