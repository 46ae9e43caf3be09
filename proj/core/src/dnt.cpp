#include "mtforge/dnt.hpp"

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace mtforge::dnt {

using nlohmann::json;

void PatternSet::check() const {
  if (!urls && !emoji && emoticons.empty())
    throw error("pattern set is empty");
  if (placeholder_prefix.empty() || placeholder_suffix.empty())
    throw error("placeholder prefix and suffix must be non-empty");
  for (const std::string &e : emoticons)
    if (e.empty())
      throw error("empty emoticon in pattern set");
}

PatternSet PatternSet::from_json(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("pattern set is not a valid object");
  PatternSet p;
  for (const auto &[key, value] : j.items()) {
    if (key == "urls")
      p.urls = value.get<bool>();
    else if (key == "emoji")
      p.emoji = value.get<bool>();
    else if (key == "emoticons")
      p.emoticons = value.get<std::vector<std::string>>();
    else if (key == "placeholder_prefix")
      p.placeholder_prefix = value.get<std::string>();
    else if (key == "placeholder_suffix")
      p.placeholder_suffix = value.get<std::string>();
    else
      throw error("unknown pattern set key \"" + key + "\"");
  }
  p.check();
  return p;
}

PatternSet PatternSet::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

bool ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

bool ascii_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

/// Bytes a URL body may contain: printable ASCII minus whitespace and
/// the quoting/bracketing characters that usually wrap URLs in prose.
bool url_body_byte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u > 0x20 && u < 0x7F && c != '<' && c != '>' && c != '"';
}

bool url_trailing_punct(char c) {
  switch (c) {
  case '.':
  case ',':
  case ';':
  case ':':
  case '!':
  case '?':
  case '\'':
  case ')':
  case ']':
  case '}':
    return true;
  default:
    return false;
  }
}

/// Length of a URL starting at pos, or 0. Matches scheme://... and
/// boundary-guarded www.... forms, with trailing sentence punctuation
/// excluded from the span.
std::size_t match_url(const std::string &s, std::size_t pos) {
  std::size_t body = 0; // offset just past "://" or "www."
  if (pos > 0 && ascii_alnum(s[pos - 1]))
    return 0;
  if (ascii_letter(s[pos])) {
    std::size_t i = pos + 1;
    while (i < s.size() && (ascii_alnum(s[i]) || s[i] == '+' || s[i] == '.' ||
                            s[i] == '-'))
      ++i;
    if (i + 2 < s.size() && s[i] == ':' && s[i + 1] == '/' && s[i + 2] == '/')
      body = i + 3;
  }
  if (body == 0 && s.compare(pos, 4, "www.") == 0)
    body = pos + 4;
  if (body == 0)
    return 0;
  std::size_t end = body;
  while (end < s.size() && url_body_byte(s[end]))
    ++end;
  while (end > body && url_trailing_punct(s[end - 1]))
    --end;
  if (end == body)
    return 0; // nothing after the scheme marker
  return end - pos;
}

bool emoji_base(char32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1F6FF) ||
         (cp >= 0x1F900 && cp <= 0x1F9FF) ||
         (cp >= 0x1FA70 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x26FF) ||
         (cp >= 0x2700 && cp <= 0x27BF) || (cp >= 0x1F1E6 && cp <= 0x1F1FF);
}

bool emoji_joiner(char32_t cp) {
  return cp == 0xFE0F || cp == 0x200D || cp == 0x20E3 ||
         (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

/// Length of a maximal emoji run (bases plus joiners, at least one
/// base) starting at pos, or 0.
std::size_t match_emoji(const std::string &s, std::size_t pos) {
  std::size_t i = pos;
  bool any_base = false;
  while (i < s.size()) {
    std::size_t next = i;
    char32_t cp = text::next_codepoint(s, next);
    if (emoji_base(cp))
      any_base = true;
    else if (!emoji_joiner(cp))
      break;
    i = next;
  }
  return any_base ? i - pos : 0;
}

/// Length of a listed emoticon starting at pos, or 0. Emoticons whose
/// edge characters are alphanumeric require a non-alphanumeric (or
/// string) boundary on that side.
std::size_t match_emoticon(const std::string &s, std::size_t pos,
                           const std::vector<std::string> &emoticons) {
  std::size_t best = 0;
  for (const std::string &e : emoticons) {
    if (e.size() <= best || s.compare(pos, e.size(), e) != 0)
      continue;
    if (ascii_alnum(e.front()) && pos > 0 && ascii_alnum(s[pos - 1]))
      continue;
    if (ascii_alnum(e.back()) && pos + e.size() < s.size() &&
        ascii_alnum(s[pos + e.size()]))
      continue;
    best = e.size();
  }
  return best;
}

} // namespace

DntSegment mask(const std::string &text_in, const PatternSet &patterns) {
  patterns.check();
  DntSegment seg;
  seg.original = text_in;
  std::size_t i = 0;
  while (i < text_in.size()) {
    std::size_t len = 0;
    if (patterns.urls)
      len = std::max(len, match_url(text_in, i));
    if (patterns.emoji)
      len = std::max(len, match_emoji(text_in, i));
    if (!patterns.emoticons.empty())
      len = std::max(len, match_emoticon(text_in, i, patterns.emoticons));
    if (len == 0) {
      std::size_t next = i;
      text::next_codepoint(text_in, next);
      seg.masked.append(text_in, i, next - i);
      i = next;
      continue;
    }
    Slot slot;
    slot.placeholder = patterns.placeholder_prefix +
                       std::to_string(seg.slots.size() + 1) +
                       patterns.placeholder_suffix;
    slot.text = text_in.substr(i, len);
    slot.start = i;
    slot.end = i + len;
    seg.masked += slot.placeholder;
    seg.slots.push_back(std::move(slot));
    i += len;
  }
  return seg;
}

UnmaskResult unmask(const std::string &translated, const DntSegment &segment) {
  UnmaskResult res;
  res.text = translated;
  std::vector<const Slot *> lost;
  for (const Slot &slot : segment.slots) {
    bool found = false;
    std::size_t pos = 0;
    while ((pos = res.text.find(slot.placeholder, pos)) !=
           std::string::npos) {
      res.text.replace(pos, slot.placeholder.size(), slot.text);
      pos += slot.text.size();
      found = true;
    }
    if (!found)
      lost.push_back(&slot);
  }
  for (const Slot *slot : lost) {
    if (!res.text.empty())
      res.text += ' ';
    res.text += slot->text;
    ++res.lost_placeholders;
  }
  return res;
}

std::string serialize(const DntSegment &seg) {
  json slots = json::array();
  for (const Slot &slot : seg.slots)
    slots.push_back({{"placeholder", slot.placeholder},
                     {"text", slot.text},
                     {"start", slot.start},
                     {"end", slot.end}});
  json j{{"original", seg.original},
         {"masked", seg.masked},
         {"slots", std::move(slots)}};
  return j.dump();
}

DntSegment parse_segment(const std::string &line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("not a valid record");
  for (const auto &[key, _] : j.items())
    if (key != "original" && key != "masked" && key != "slots")
      throw error("unknown field \"" + key + "\"");
  if (!j.contains("original") || !j.contains("masked") || !j.contains("slots"))
    throw error("segment needs original, masked, slots");
  DntSegment seg;
  seg.original = j.at("original").get<std::string>();
  seg.masked = j.at("masked").get<std::string>();
  for (const auto &s : j.at("slots"))
    seg.slots.push_back({s.at("placeholder").get<std::string>(),
                         s.at("text").get<std::string>(),
                         s.at("start").get<std::size_t>(),
                         s.at("end").get<std::size_t>()});
  return seg;
}

} // namespace mtforge::dnt
