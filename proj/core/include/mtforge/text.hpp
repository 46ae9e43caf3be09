#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtforge::text {

inline constexpr std::uint32_t kInvalidCp = 0xFFFFFFFFu;

// Decodes the code point starting at byte i and advances i past it.
// Invalid sequences yield kInvalidCp and advance by one byte, so callers
// that copy the original byte span stay lossless on malformed input.
std::uint32_t next_codepoint(std::string_view s, std::size_t &i);

void append_utf8(std::uint32_t cp, std::string &out);

std::size_t codepoint_count(std::string_view s);

bool is_cjk(std::uint32_t cp);

std::string_view trim(std::string_view s);

/// Maps full-width forms U+FF01..U+FF5E and the ideographic space U+3000
/// to their half-width counterparts; every other byte is copied verbatim.
std::string normalize_width(std::string_view s);

// Byte ranges [begin, end) of the counted words of s.
// Text with an ASCII space or tab splits into whitespace-delimited tokens.
// Spaceless text that is at least half CJK counts each CJK character as one
// word and each maximal non-CJK run as one word; other spaceless text is a
// single word.
std::vector<std::pair<std::size_t, std::size_t>> word_spans(std::string_view s);

std::size_t count_words(std::string_view s);

/// Prefix of s containing at most max_words counted words.
std::string_view truncate_words(std::string_view s, std::size_t max_words);

} // namespace mtforge::text
