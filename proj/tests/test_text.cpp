#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtforge/text.hpp"

using namespace mtforge;

TEST_CASE("count_words splits spaced text on whitespace runs") {
  CHECK(text::count_words("the cat sat") == 3);
  CHECK(text::count_words("  leading and   trailing  ") == 3);
  CHECK(text::count_words("a\tb") == 2);
  CHECK(text::count_words("") == 0);
  CHECK(text::count_words("   ") == 0);
  CHECK(text::count_words("hello") == 1);
}

TEST_CASE("count_words treats CJK characters as single words") {
  CHECK(text::count_words("你好世界") == 4);
  // Mixed: four ideographs plus one latin run.
  CHECK(text::count_words("你好abc世界") == 5);
  // Spaces win even when the text is CJK.
  CHECK(text::count_words("你好 世界") == 2);
  // Mostly-latin spaceless text is one word.
  CHECK(text::count_words("hello-world") == 1);
  CHECK(text::count_words("x你") == 2); // half CJK qualifies
}

TEST_CASE("word_spans cover the counted words") {
  auto spans = text::word_spans("ab cd");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(spans[1] == std::pair<std::size_t, std::size_t>{3, 5});
}

TEST_CASE("truncate_words keeps a word-count prefix") {
  CHECK(text::truncate_words("a b c d", 2) == "a b");
  CHECK(text::truncate_words("a b", 5) == "a b");
  CHECK(text::truncate_words("你好世界", 2) == "你好");
  CHECK(text::truncate_words("abc", 0).empty());
}

TEST_CASE("normalize_width folds full-width forms") {
  CHECK(text::normalize_width("ＡＢＣ１２３") == "ABC123");
  CHECK(text::normalize_width("！？") == "!?");
  CHECK(text::normalize_width("a　b") == "a b");
  CHECK(text::normalize_width("plain text") == "plain text");
  CHECK(text::normalize_width("你好") == "你好"); // ideographs untouched
}

TEST_CASE("codepoint navigation") {
  CHECK(text::codepoint_count("abc") == 3);
  CHECK(text::codepoint_count("你好") == 2);
  std::size_t i = 0;
  CHECK(text::next_codepoint("你", i) == 0x4F60);
  CHECK(i == 3);
  std::string out;
  text::append_utf8(0x4F60, out);
  CHECK(out == "你");
}

TEST_CASE("malformed utf-8 advances one byte at a time") {
  std::string bad = "a\xFFz";
  std::size_t i = 1;
  CHECK(text::next_codepoint(bad, i) == text::kInvalidCp);
  CHECK(i == 2);
  CHECK(text::codepoint_count(bad) == 3);
}

TEST_CASE("trim strips ascii whitespace") {
  CHECK(text::trim("  a b \t") == "a b");
  CHECK(text::trim("\r\n") == "");
  CHECK(text::trim("x") == "x");
}

TEST_CASE("is_cjk covers the ideograph blocks") {
  CHECK(text::is_cjk(0x4E00));
  CHECK(text::is_cjk(0x9FFF));
  CHECK(text::is_cjk(0x3400));
  CHECK(text::is_cjk(0xF900));
  CHECK(text::is_cjk(0x20000));
  CHECK_FALSE(text::is_cjk(u'a'));
  CHECK_FALSE(text::is_cjk(0x3042)); // hiragana
}
