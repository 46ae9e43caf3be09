#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtforge/error.hpp"
#include "mtforge/llm_data.hpp"
#include "mtforge/manifest.hpp"
#include "mtforge/text.hpp"

#include "temp_dir.hpp"

#include <string>
#include <vector>

using namespace mtforge;
using llm_data::PackedDocument;
using llm_data::PreferenceTriplet;
using llm_data::PromptTemplate;
using llm_data::TemplateStage;

namespace {

MonolingualRecord make_mono(const std::string &id, const std::string &text,
                            const char *doc = nullptr) {
  MonolingualRecord m;
  m.id = id;
  m.text = text;
  if (doc)
    m.doc_id = doc;
  return m;
}

std::string words(int n, char c = 'w') {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i)
      out += ' ';
    out += c;
  }
  return out;
}

Hypothesis make_hyp(const std::string &src_id, const std::string &text,
                    double score) {
  Hypothesis h;
  h.src_id = src_id;
  h.text = text;
  h.score = score;
  return h;
}

std::string concat_segments(const std::vector<PackedDocument> &packs) {
  std::string all;
  for (const auto &p : packs)
    for (const auto &s : p.segments)
      all += s.id + ":" + s.text + "|";
  return all;
}

} // namespace

TEST_CASE("packing respects the cap and keeps input order") {
  std::vector<MonolingualRecord> recs = {
      make_mono("a", words(3)),
      make_mono("b", words(3)),
      make_mono("c", words(3)),
  };
  auto packs = llm_data::pack_cpt(recs, 6);
  REQUIRE(packs.size() == 2);
  CHECK(packs[0].id == "pack-1");
  CHECK(packs[0].word_count == 6);
  CHECK(packs[0].segments.size() == 2);
  CHECK(packs[1].segments.size() == 1);
  CHECK_FALSE(packs[0].truncated);
  CHECK(concat_segments(packs) ==
        "a:" + words(3) + "|b:" + words(3) + "|c:" + words(3) + "|");
}

TEST_CASE("a document that fits is never split across packs") {
  std::vector<MonolingualRecord> recs = {
      make_mono("filler", words(4)),
      make_mono("d1", words(3), "doc"),
      make_mono("d2", words(3), "doc"),
  };
  // Without the group rule d1 would land beside the filler (4+3 <= 8).
  auto packs = llm_data::pack_cpt(recs, 8);
  REQUIRE(packs.size() == 2);
  CHECK(packs[0].segments.size() == 1);
  CHECK(packs[1].segments.size() == 2);
  CHECK(packs[1].segments[0].id == "d1");
  CHECK(packs[1].segments[1].id == "d2");
}

TEST_CASE("a document larger than the cap may span packs") {
  std::vector<MonolingualRecord> recs = {
      make_mono("d1", words(5), "doc"),
      make_mono("d2", words(5), "doc"),
      make_mono("d3", words(5), "doc"),
  };
  auto packs = llm_data::pack_cpt(recs, 10);
  REQUIRE(packs.size() == 2);
  CHECK(packs[0].word_count == 10);
  CHECK(packs[1].word_count == 5);
  CHECK_FALSE(packs[0].truncated);
}

TEST_CASE("an oversize record is truncated into its own pack") {
  std::vector<MonolingualRecord> recs = {
      make_mono("small", words(2)),
      make_mono("huge", words(12)),
      make_mono("after", words(2)),
  };
  auto packs = llm_data::pack_cpt(recs, 5);
  REQUIRE(packs.size() == 3);
  CHECK(packs[1].truncated);
  CHECK(packs[1].word_count == 5);
  CHECK(packs[1].segments.size() == 1);
  CHECK(text::count_words(packs[1].segments[0].text) == 5);
  CHECK_FALSE(packs[0].truncated);
  CHECK(packs[2].segments[0].id == "after");
}

TEST_CASE("scattered document pieces are regrouped by first appearance") {
  std::vector<MonolingualRecord> recs = {
      make_mono("a1", words(2), "A"),
      make_mono("b1", words(2), "B"),
      make_mono("a2", words(2), "A"),
  };
  auto packs = llm_data::pack_cpt(recs, 100);
  REQUIRE(packs.size() == 1);
  REQUIRE(packs[0].segments.size() == 3);
  CHECK(packs[0].segments[0].id == "a1");
  CHECK(packs[0].segments[1].id == "a2");
  CHECK(packs[0].segments[2].id == "b1");
}

TEST_CASE("packed documents survive the wire") {
  TempDir tmp;
  auto packs = llm_data::pack_cpt({make_mono("a", "x y"), make_mono("b", "z")}, 2);
  std::string path = tmp.file("packed.jsonl");
  llm_data::write_packed(path, packs);
  auto back = llm_data::read_packed(path);
  REQUIRE(back.size() == packs.size());
  CHECK(back[0].id == packs[0].id);
  CHECK(back[0].word_count == packs[0].word_count);
  CHECK(back[0].truncated == packs[0].truncated);
  REQUIRE(back[0].segments.size() == packs[0].segments.size());
  CHECK(back[0].segments[0].id == packs[0].segments[0].id);
  CHECK(back[0].segments[0].text == packs[0].segments[0].text);
}

TEST_CASE("sft filter keeps strictly above the threshold") {
  std::vector<SentencePair> pairs(4);
  pairs[0].id = "above";
  pairs[0].scores["qe"] = 0.800001;
  pairs[1].id = "at";
  pairs[1].scores["qe"] = 0.8;
  pairs[2].id = "below";
  pairs[2].scores["qe"] = 0.1;
  pairs[3].id = "missing";
  CorpusManifest manifest;
  auto out = llm_data::filter_sft(pairs, 0.8, &manifest);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "above");
  CHECK(manifest.counters.at("qe_missing_score") == 1);
}

TEST_CASE("cpo picks extremes with lexicographic tie-breaks") {
  std::vector<SentencePair> sources(1);
  sources[0].id = "s";
  sources[0].src = "source text";
  std::vector<Hypothesis> hyps = {
      make_hyp("s", "bravo", 0.9),
      make_hyp("s", "alpha", 0.9),  // ties on top: lexs smaller text wins
      make_hyp("s", "delta", 0.1),
      make_hyp("s", "carol", 0.1),  // ties on bottom: lexs larger text loses
  };
  CorpusManifest manifest;
  auto triplets = llm_data::build_cpo_triplets(sources, hyps, 4, &manifest);
  REQUIRE(triplets.size() == 1);
  CHECK(triplets[0].src_id == "s");
  CHECK(triplets[0].source == "source text");
  CHECK(triplets[0].preferred == "alpha");
  CHECK(triplets[0].preferred_score == 0.9);
  CHECK(triplets[0].dispreferred == "delta");
  CHECK(triplets[0].dispreferred_score == 0.1);
  CHECK(manifest.counters.count("cpo_identical_pools") == 0);
  CHECK(manifest.counters.count("cpo_pool_size_mismatch") == 0);
}

TEST_CASE("cpo skips pools whose texts are all identical") {
  std::vector<SentencePair> sources(2);
  sources[0].id = "same";
  sources[1].id = "ok";
  std::vector<Hypothesis> hyps = {
      make_hyp("same", "x", 0.9),
      {"same", System::llm, GenMethod::beam, "x", 0.1},
      make_hyp("ok", "a", 0.5),
      make_hyp("ok", "b", 0.4),
  };
  CorpusManifest manifest;
  auto triplets = llm_data::build_cpo_triplets(sources, hyps, 2, &manifest);
  REQUIRE(triplets.size() == 1);
  CHECK(triplets[0].src_id == "ok");
  CHECK(manifest.counters.at("cpo_identical_pools") == 1);
}

TEST_CASE("cpo counts pools that miss the expected size") {
  std::vector<SentencePair> sources(1);
  sources[0].id = "s";
  std::vector<Hypothesis> hyps = {make_hyp("s", "a", 0.5),
                                  make_hyp("s", "b", 0.4)};
  CorpusManifest manifest;
  auto triplets = llm_data::build_cpo_triplets(sources, hyps, 10, &manifest);
  CHECK(manifest.counters.at("cpo_pool_size_mismatch") == 1);
  // The pool is counted, not dropped.
  REQUIRE(triplets.size() == 1);
  CHECK(triplets[0].preferred == "a");
  CHECK(triplets[0].dispreferred == "b");
}

TEST_CASE("cpo rejects malformed inputs") {
  std::vector<SentencePair> sources(1);
  sources[0].id = "s";
  CHECK_THROWS_AS(
      llm_data::build_cpo_triplets(sources, {make_hyp("zz", "a", 0.5)}, 1,
                                   nullptr),
      error);
  CHECK_THROWS_AS(
      llm_data::build_cpo_triplets(sources, {make_hyp("s", "a", 0.5)}, 1,
                                   nullptr),
      error); // fewer than two hypotheses
  Hypothesis unscored;
  unscored.src_id = "s";
  unscored.text = "a";
  CHECK_THROWS_AS(llm_data::build_cpo_triplets(
                      sources, {unscored, make_hyp("s", "b", 0.4)}, 2, nullptr),
                  error);
}

TEST_CASE("triplets survive the wire and are validated on the way in") {
  TempDir tmp;
  PreferenceTriplet t{"s", "src", "good", 0.9, "bad", 0.2};
  std::string path = tmp.file("trip.jsonl");
  llm_data::write_triplets(path, {t});
  auto back = llm_data::read_triplets(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].preferred == "good");

  CHECK_THROWS_AS(
      llm_data::parse_triplet(llm_data::serialize(
          PreferenceTriplet{"s", "src", "same", 0.9, "same", 0.2})),
      error);
  CHECK_THROWS_AS(
      llm_data::parse_triplet(llm_data::serialize(
          PreferenceTriplet{"s", "src", "good", 0.1, "bad", 0.2})),
      error);
}

TEST_CASE("template placeholders parse, render, and reject junk") {
  PromptTemplate tmpl;
  tmpl.stage = TemplateStage::sft;
  tmpl.text = "Translate {src_lang} to {tgt_lang}: {src} => {tgt}";
  CHECK_NOTHROW(tmpl.check());
  auto ph = tmpl.placeholders();
  CHECK(ph == std::vector<std::string>{"src_lang", "tgt_lang", "src", "tgt"});

  SentencePair p;
  p.id = "x";
  p.src = "hello";
  p.tgt = "你好";
  std::string rendered = llm_data::render(
      tmpl, llm_data::render_values(p, "English", "Chinese"));
  CHECK(rendered == "Translate English to Chinese: hello => 你好");
}

TEST_CASE("template braces escape by doubling") {
  PromptTemplate tmpl;
  tmpl.stage = TemplateStage::cpt;
  tmpl.text = "literal {{braces}} and {src}";
  CHECK(tmpl.placeholders() == std::vector<std::string>{"src"});
  SentencePair p;
  p.src = "X";
  std::string rendered =
      llm_data::render(tmpl, llm_data::render_values(p, "a", "b"));
  CHECK(rendered == "literal {braces} and X");
}

TEST_CASE("template validation failures") {
  PromptTemplate bad;
  bad.stage = TemplateStage::sft;
  bad.text = "no source here {tgt}";
  CHECK_THROWS_AS(bad.check(), error); // sft must use {src}

  PromptTemplate unknown;
  unknown.stage = TemplateStage::cpt;
  unknown.text = "hello {world}";
  CHECK_THROWS_AS(unknown.check(), error);

  PromptTemplate unclosed;
  unclosed.stage = TemplateStage::cpt;
  unclosed.text = "oops {src";
  CHECK_THROWS_AS(unclosed.placeholders(), error);

  PromptTemplate stray;
  stray.stage = TemplateStage::cpt;
  stray.text = "oops } here";
  CHECK_THROWS_AS(stray.placeholders(), error);
}

TEST_CASE("render rejects unbound placeholders") {
  PromptTemplate tmpl;
  tmpl.stage = TemplateStage::cpt;
  tmpl.text = "{src}";
  CHECK_THROWS_AS(llm_data::render(tmpl, {}), error);
}

TEST_CASE("templates load from disk with one trailing newline stripped") {
  TempDir tmp;
  std::string path = tmp.write("sft.tmpl", "{src} -> {tgt}\n");
  PromptTemplate tmpl = PromptTemplate::load(path, TemplateStage::sft);
  CHECK(tmpl.text == "{src} -> {tgt}");
  CHECK(tmpl.stage == TemplateStage::sft);

  std::string bad = tmp.write("bad.tmpl", "{tgt} only");
  CHECK_THROWS_AS(PromptTemplate::load(bad, TemplateStage::sft), error);
}

TEST_CASE("stage names round trip") {
  CHECK(llm_data::template_stage_from_string("cpt") == TemplateStage::cpt);
  CHECK(llm_data::template_stage_from_string("sft") == TemplateStage::sft);
  CHECK(llm_data::template_stage_from_string("cpo") == TemplateStage::cpo);
  CHECK_THROWS_AS(llm_data::template_stage_from_string("rm"), error);
}
