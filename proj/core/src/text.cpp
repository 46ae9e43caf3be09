#include "mtforge/text.hpp"

namespace mtforge::text {

std::uint32_t next_codepoint(std::string_view s, std::size_t &i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto cont = [&](std::size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    std::uint32_t cp = (b0 & 0x1Fu) << 6 |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    i += 2;
    return cp >= 0x80 ? cp : kInvalidCp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    std::uint32_t cp = (b0 & 0x0Fu) << 12 |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                       (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    i += 3;
    return cp >= 0x800 ? cp : kInvalidCp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    std::uint32_t cp = (b0 & 0x07u) << 18 |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                       (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                       (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    i += 4;
    return cp >= 0x10000 && cp <= 0x10FFFF ? cp : kInvalidCp;
  }
  ++i;
  return kInvalidCp;
}

void append_utf8(std::uint32_t cp, std::string &out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t i = 0, n = 0;
  while (i < s.size()) {
    next_codepoint(s, i);
    ++n;
  }
  return n;
}

bool is_cjk(std::uint32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||   // unified ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||   // extension A
         (cp >= 0xF900 && cp <= 0xFAFF) ||   // compatibility ideographs
         (cp >= 0x20000 && cp <= 0x2A6DF);   // extension B
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  };
  while (b < e && is_ws(s[b]))
    ++b;
  while (e > b && is_ws(s[e - 1]))
    --e;
  return s.substr(b, e - b);
}

std::string normalize_width(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = next_codepoint(s, i);
    if (cp == 0x3000) {
      out.push_back(' ');
    } else if (cp >= 0xFF01 && cp <= 0xFF5E) {
      out.push_back(static_cast<char>(cp - 0xFEE0));
    } else {
      out.append(s.substr(start, i - start));
    }
  }
  return out;
}

namespace {

bool has_ascii_space(std::string_view s) {
  for (char c : s)
    if (c == ' ' || c == '\t')
      return true;
  return false;
}

std::vector<std::pair<std::size_t, std::size_t>>
whitespace_spans(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
      ++i;
    if (i >= s.size())
      break;
    std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t')
      ++i;
    spans.emplace_back(b, i);
  }
  return spans;
}

} // namespace

std::vector<std::pair<std::size_t, std::size_t>>
word_spans(std::string_view s) {
  if (s.empty())
    return {};
  if (has_ascii_space(s))
    return whitespace_spans(s);

  std::size_t cjk = 0, total = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_cjk(next_codepoint(s, i)))
      ++cjk;
    ++total;
  }
  if (cjk * 2 < total)
    return {{0, s.size()}};

  // CJK-dominant spaceless text: one word per CJK character, one word per
  // maximal non-CJK run.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  i = 0;
  std::size_t run_begin = std::string_view::npos;
  while (i < s.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = next_codepoint(s, i);
    if (is_cjk(cp)) {
      if (run_begin != std::string_view::npos) {
        spans.emplace_back(run_begin, start);
        run_begin = std::string_view::npos;
      }
      spans.emplace_back(start, i);
    } else if (run_begin == std::string_view::npos) {
      run_begin = start;
    }
  }
  if (run_begin != std::string_view::npos)
    spans.emplace_back(run_begin, s.size());
  return spans;
}

std::size_t count_words(std::string_view s) { return word_spans(s).size(); }

std::string_view truncate_words(std::string_view s, std::size_t max_words) {
  if (max_words == 0)
    return s.substr(0, 0);
  auto spans = word_spans(s);
  if (spans.size() <= max_words)
    return s;
  return s.substr(0, spans[max_words - 1].second);
}

} // namespace mtforge::text
