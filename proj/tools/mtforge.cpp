// mtforge — corpus construction and hypothesis selection toolkit.
// Exit codes: 0 ok, 1 processing/data error, 2 usage or config error.

#include "mtforge/augment.hpp"
#include "mtforge/curriculum.hpp"
#include "mtforge/dnt.hpp"
#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/llm_data.hpp"
#include "mtforge/manifest.hpp"
#include "mtforge/mbr.hpp"
#include "mtforge/metrics.hpp"
#include "mtforge/pipeline.hpp"
#include "mtforge/preprocess.hpp"
#include "mtforge/scores.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace mtforge;

// Thrown for problems the user must fix on the command line or in a
// config file, as opposed to bad data.
struct usage_error : std::runtime_error {
  explicit usage_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Re-labels config-load failures as usage errors.
template <typename Fn> auto load_config(Fn fn) {
  try {
    return fn();
  } catch (const error &e) {
    throw usage_error(e.what());
  }
}

void note(const std::string &msg) { std::cerr << "mtforge: " << msg << "\n"; }

void save_manifest(const CorpusManifest &m, const std::string &path) {
  if (!path.empty())
    m.save(path);
}

// ---------------------------------------------------------------- corpus

void add_corpus(CLI::App &app) {
  auto *corpus = app.add_subcommand("corpus", "inspect and join corpora");
  corpus->require_subcommand(1);

  {
    auto *cmd = corpus->add_subcommand("attach", "join scores onto pairs");
    auto pairs = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--pairs", *pairs, "sentence pairs (jsonl)")->required();
    cmd->add_option("--scores", *scores, "score records (jsonl)")->required();
    cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
    cmd->callback([pairs, scores, out] {
      AttachResult res =
          attach_scores(read_pairs(*pairs), ScoreTable::load(*scores));
      write_pairs(*out, res.pairs);
      note("attached scores to " + std::to_string(res.pairs.size()) +
           " pairs, " + std::to_string(res.orphan_scores) + " orphan scores");
    });
  }

  {
    auto *cmd = corpus->add_subcommand("validate", "check a jsonl corpus");
    auto in = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>("pairs");
    cmd->add_option("--in", *in, "input (jsonl)")->required();
    cmd->add_option("--kind", *kind, "pairs|mono|hyps|scores");
    cmd->callback([in, kind] {
      RecordKind k;
      try {
        k = kind_from_string(*kind);
      } catch (const error &e) {
        throw usage_error(e.what());
      }
      std::size_t n = validate_corpus(*in, k);
      std::cout << *in << ": " << n << " " << *kind << " records\n";
    });
  }
}

// ------------------------------------------------------------ preprocess

void add_preprocess(CLI::App &app) {
  auto *pre = app.add_subcommand("preprocess", "clean and filter pairs");
  pre->require_subcommand(1);

  auto *cmd = pre->add_subcommand("run", "run a filter chain");
  auto in = std::make_shared<std::string>();
  auto scores = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto config = std::make_shared<std::string>();
  auto manifest_path = std::make_shared<std::string>();
  auto stages = std::make_shared<std::string>();
  auto shards = std::make_shared<unsigned>(1);
  cmd->add_option("--in", *in, "sentence pairs (jsonl)")->required();
  cmd->add_option("--scores", *scores, "score records to attach first");
  cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
  cmd->add_option("--config", *config, "filter config (json)");
  cmd->add_option("--manifest", *manifest_path, "write manifest here (json)");
  cmd->add_option("--stages", *stages,
                  "comma list: dedup,normwidth,segment,normpunct,lang,len,"
                  "align,sim")
      ->required();
  cmd->add_option("--shards", *shards, "worker shards")->check(CLI::PositiveNumber);
  cmd->callback([in, scores, out, config, manifest_path, stages, shards] {
    preprocess::FilterConfig cfg = load_config([&] {
      return config->empty() ? preprocess::FilterConfig{}
                             : preprocess::FilterConfig::load(*config);
    });
    std::vector<std::string> chain =
        load_config([&] { return preprocess::parse_stage_list(*stages); });
    std::vector<SentencePair> pairs = read_pairs(*in);
    if (!scores->empty())
      pairs = attach_scores(std::move(pairs), ScoreTable::load(*scores)).pairs;
    CorpusManifest manifest;
    std::size_t before = pairs.size();
    pairs = preprocess::run_chain(std::move(pairs), cfg, chain, manifest,
                                  *shards);
    write_pairs(*out, pairs);
    save_manifest(manifest, *manifest_path);
    note("kept " + std::to_string(pairs.size()) + " of " +
         std::to_string(before) + " pairs");
  });
}

// --------------------------------------------------------------- augment

void add_augment(CLI::App &app) {
  auto *aug = app.add_subcommand("augment", "build synthetic corpora");
  aug->require_subcommand(1);

  {
    auto *cmd = aug->add_subcommand("bit", "append the reversed corpus");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "sentence pairs (jsonl)")->required();
    cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
    cmd->callback([in, out] {
      std::vector<SentencePair> pairs = augment::bit_reconstruct(read_pairs(*in));
      write_pairs(*out, pairs);
      note(std::to_string(pairs.size()) + " pairs");
    });
  }

  {
    auto *cmd = aug->add_subcommand(
        "dd", "merge forward and backward translations of the same corpus");
    auto in = std::make_shared<std::string>();
    auto fwd = std::make_shared<std::string>();
    auto bwd = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto manifest_path = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "original pairs (jsonl)")->required();
    cmd->add_option("--forward", *fwd, "src->tgt hypotheses (jsonl)")->required();
    cmd->add_option("--backward", *bwd, "tgt->src hypotheses (jsonl)")->required();
    cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
    cmd->add_option("--manifest", *manifest_path, "write manifest here (json)");
    cmd->callback([in, fwd, bwd, out, manifest_path] {
      CorpusManifest manifest;
      std::vector<SentencePair> pairs = augment::dd_merge(
          read_pairs(*in), augment::TranslationBatch::load(*fwd, "forward"),
          augment::TranslationBatch::load(*bwd, "backward"), &manifest);
      write_pairs(*out, pairs);
      save_manifest(manifest, *manifest_path);
      note(std::to_string(pairs.size()) + " pairs");
    });
  }

  {
    auto *cmd = aug->add_subcommand("ft", "forward-translate monolingual text");
    auto mono = std::make_shared<std::string>();
    auto translations = std::make_shared<std::string>();
    auto authentic = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--mono", *mono, "monolingual records (jsonl)")->required();
    cmd->add_option("--translations", *translations,
                    "their translations (jsonl hypotheses)")
        ->required();
    cmd->add_option("--authentic", *authentic, "authentic pairs to append");
    cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
    cmd->callback([mono, translations, authentic, out] {
      std::vector<SentencePair> auth;
      if (!authentic->empty())
        auth = read_pairs(*authentic);
      std::vector<SentencePair> pairs = augment::ft_build(
          read_mono(*mono),
          augment::TranslationBatch::load(*translations, "forward"), auth);
      write_pairs(*out, pairs);
      note(std::to_string(pairs.size()) + " pairs");
    });
  }

  {
    auto *cmd = aug->add_subcommand("sample", "uniform monolingual sample");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto n = std::make_shared<std::uint64_t>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--in", *in, "monolingual records (jsonl)")->required();
    cmd->add_option("--out", *out, "output records (jsonl)")->required();
    cmd->add_option("--n", *n, "sample size")->required();
    cmd->add_option("--seed", *seed, "rng seed");
    cmd->callback([in, out, n, seed] {
      std::vector<MonolingualRecord> sampled =
          augment::mono_sample(read_mono(*in), *n, *seed);
      write_mono(*out, sampled);
      note(std::to_string(sampled.size()) + " records");
    });
  }

  {
    auto *cmd = aug->add_subcommand("bt-tag", "tag back-translated sources");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto tag = std::make_shared<std::string>("<BT>");
    auto manifest_path = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "backward-synthetic pairs (jsonl)")->required();
    cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
    cmd->add_option("--tag", *tag, "prefix token");
    cmd->add_option("--manifest", *manifest_path, "write manifest here (json)");
    cmd->callback([in, out, tag, manifest_path] {
      CorpusManifest manifest;
      std::vector<SentencePair> pairs =
          augment::bt_tag(read_pairs(*in), *tag, &manifest);
      write_pairs(*out, pairs);
      save_manifest(manifest, *manifest_path);
      note(std::to_string(pairs.size()) + " pairs tagged");
    });
  }

  {
    auto *cmd = aug->add_subcommand(
        "at-schedule", "alternating synthetic/authentic training schedule");
    auto out = std::make_shared<std::string>();
    auto total = std::make_shared<std::uint64_t>(0);
    auto syn = std::make_shared<std::uint64_t>(0);
    auto auth = std::make_shared<std::uint64_t>(0);
    auto start = std::make_shared<std::string>("synthetic");
    cmd->add_option("--out", *out, "schedule (jsonl)")->required();
    cmd->add_option("--total-steps", *total, "steps overall")->required();
    cmd->add_option("--synthetic-len", *syn, "steps per synthetic phase")
        ->required();
    cmd->add_option("--authentic-len", *auth, "steps per authentic phase")
        ->required();
    cmd->add_option("--start-with", *start, "synthetic|authentic");
    cmd->callback([out, total, syn, auth, start] {
      augment::PhaseKind kind;
      try {
        kind = augment::phase_kind_from_string(*start);
      } catch (const error &e) {
        throw usage_error(e.what());
      }
      augment::AlternationSchedule sched =
          augment::at_schedule(*total, *syn, *auth, kind);
      sched.save(*out);
      note(std::to_string(sched.phases.size()) + " phases, " +
           std::to_string(sched.total_steps()) + " steps");
    });
  }

  {
    auto *cmd = aug->add_subcommand(
        "tel", "pair test sources with every model's translations");
    auto sources = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto batches = std::make_shared<std::vector<std::string>>();
    cmd->add_option("--sources", *sources, "test sources (jsonl mono)")
        ->required();
    cmd->add_option("--batch", *batches,
                    "model=path, one per participating model")
        ->required()
        ->expected(-1);
    cmd->add_option("--out", *out, "output pairs (jsonl)")->required();
    cmd->callback([sources, out, batches] {
      std::vector<augment::TranslationBatch> loaded;
      for (const std::string &spec : *batches) {
        std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
          throw usage_error("--batch wants model=path, got \"" + spec + "\"");
        loaded.push_back(augment::TranslationBatch::load(spec.substr(eq + 1),
                                                         spec.substr(0, eq)));
      }
      std::vector<SentencePair> pairs =
          augment::tel_build(read_mono(*sources), loaded);
      write_pairs(*out, pairs);
      note(std::to_string(pairs.size()) + " pairs");
    });
  }
}

// ------------------------------------------------------------ curriculum

void add_curriculum(CLI::App &app) {
  auto *cur = app.add_subcommand("curriculum", "difficulty-ordered sampling");
  cur->require_subcommand(1);

  {
    auto *cmd = cur->add_subcommand("score", "rank pairs into buckets");
    auto in = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto buckets = std::make_shared<std::size_t>(0);
    cmd->add_option("--in", *in, "sentence pairs (jsonl)")->required();
    cmd->add_option("--scores", *scores,
                    "score records carrying logp_in/logp_out");
    cmd->add_option("--out", *out, "curriculum items (jsonl)")->required();
    cmd->add_option("--buckets", *buckets, "bucket count")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->callback([in, scores, out, buckets] {
      std::vector<SentencePair> pairs = read_pairs(*in);
      if (!scores->empty())
        pairs = attach_scores(std::move(pairs), ScoreTable::load(*scores)).pairs;
      std::vector<curriculum::CurriculumItem> items = curriculum::rank_and_bucket(
          curriculum::inputs_from_pairs(pairs), *buckets);
      curriculum::write_items(*out, items);
      note(std::to_string(items.size()) + " items in " +
           std::to_string(*buckets) + " buckets");
    });
  }

  {
    auto *cmd = cur->add_subcommand("sample", "draw scheduled batches");
    auto items = std::make_shared<std::string>();
    auto plan = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto steps = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--items", *items, "curriculum items (jsonl)")->required();
    cmd->add_option("--plan", *plan, "sampling plan (json)")->required();
    cmd->add_option("--out", *out, "batches (jsonl)")->required();
    cmd->add_option("--steps", *steps, "batches to draw")->required();
    cmd->callback([items, plan, out, steps] {
      curriculum::SamplingPlan p =
          load_config([&] { return curriculum::SamplingPlan::load(*plan); });
      std::vector<curriculum::Batch> batches =
          curriculum::sample_batches(curriculum::read_items(*items), p, *steps);
      curriculum::write_batches(*out, batches);
      note(std::to_string(batches.size()) + " batches");
    });
  }
}

// -------------------------------------------------------------- llm-data

void add_llm_data(CLI::App &app) {
  auto *llm = app.add_subcommand("llm-data", "training data for LLM stages");
  llm->require_subcommand(1);

  {
    auto *cmd = llm->add_subcommand("pack", "pack documents to a word cap");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto cap = std::make_shared<std::uint64_t>(4096);
    cmd->add_option("--in", *in, "monolingual records (jsonl)")->required();
    cmd->add_option("--out", *out, "packed documents (jsonl)")->required();
    cmd->add_option("--cap", *cap, "words per pack")->check(CLI::PositiveNumber);
    cmd->callback([in, out, cap] {
      std::vector<llm_data::PackedDocument> packs =
          llm_data::pack_cpt(read_mono(*in), *cap);
      llm_data::write_packed(*out, packs);
      note(std::to_string(packs.size()) + " packs");
    });
  }

  {
    auto *cmd = llm->add_subcommand("sft", "quality-filter supervised pairs");
    auto in = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto rendered = std::make_shared<std::string>();
    auto template_path = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.8);
    auto src_lang = std::make_shared<std::string>("English");
    auto tgt_lang = std::make_shared<std::string>("Chinese");
    auto manifest_path = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "sentence pairs (jsonl)")->required();
    cmd->add_option("--scores", *scores, "score records carrying qe");
    cmd->add_option("--out", *out, "kept pairs (jsonl)")->required();
    cmd->add_option("--threshold", *threshold, "keep pairs with qe above this");
    cmd->add_option("--template", *template_path, "prompt template file");
    cmd->add_option("--rendered", *rendered,
                    "write rendered prompts here (jsonl; needs --template)");
    cmd->add_option("--src-lang", *src_lang, "source language name");
    cmd->add_option("--tgt-lang", *tgt_lang, "target language name");
    cmd->add_option("--manifest", *manifest_path, "write manifest here (json)");
    cmd->callback([in, scores, out, rendered, template_path, threshold,
                   src_lang, tgt_lang, manifest_path] {
      if (!rendered->empty() && template_path->empty())
        throw usage_error("--rendered needs --template");
      std::vector<SentencePair> pairs = read_pairs(*in);
      if (!scores->empty())
        pairs = attach_scores(std::move(pairs), ScoreTable::load(*scores)).pairs;
      CorpusManifest manifest;
      pairs = llm_data::filter_sft(std::move(pairs), *threshold, &manifest);
      write_pairs(*out, pairs);
      if (!template_path->empty()) {
        llm_data::PromptTemplate tmpl = load_config([&] {
          return llm_data::PromptTemplate::load(*template_path,
                                                llm_data::TemplateStage::sft);
        });
        if (!rendered->empty()) {
          LineWriter w(*rendered);
          for (const SentencePair &p : pairs) {
            nlohmann::json j{
                {"id", p.id},
                {"text", llm_data::render(tmpl, llm_data::render_values(
                                                    p, *src_lang, *tgt_lang))}};
            w.write(j.dump());
          }
          w.close();
        }
      }
      save_manifest(manifest, *manifest_path);
      note("kept " + std::to_string(pairs.size()) + " pairs");
    });
  }

  {
    auto *cmd = llm->add_subcommand("cpo", "preference triplets from n-best");
    auto sources = std::make_shared<std::string>();
    auto hyps = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto nbest = std::make_shared<std::size_t>(10);
    auto manifest_path = std::make_shared<std::string>();
    cmd->add_option("--sources", *sources, "source pairs (jsonl)")->required();
    cmd->add_option("--hyps", *hyps, "scored hypotheses (jsonl)")->required();
    cmd->add_option("--out", *out, "triplets (jsonl)")->required();
    cmd->add_option("--nbest", *nbest, "expected hypotheses per source");
    cmd->add_option("--manifest", *manifest_path, "write manifest here (json)");
    cmd->callback([sources, hyps, out, nbest, manifest_path] {
      CorpusManifest manifest;
      std::vector<llm_data::PreferenceTriplet> triplets =
          llm_data::build_cpo_triplets(read_pairs(*sources),
                                       read_hypotheses(*hyps), *nbest,
                                       &manifest);
      llm_data::write_triplets(*out, triplets);
      save_manifest(manifest, *manifest_path);
      note(std::to_string(triplets.size()) + " triplets");
    });
  }
}

// --------------------------------------------------------------- metrics

void add_metrics(CLI::App &app) {
  auto *met = app.add_subcommand("metrics", "surface-overlap scores");
  met->require_subcommand(1);

  {
    auto *cmd = met->add_subcommand("chrf", "character n-gram F score");
    auto hyp = std::make_shared<std::string>();
    auto ref = std::make_shared<std::string>();
    auto max_n = std::make_shared<int>(6);
    auto beta = std::make_shared<double>(2.0);
    cmd->add_option("--hyp", *hyp, "hypothesis text")->required();
    cmd->add_option("--ref", *ref, "reference text")->required();
    cmd->add_option("--max-n", *max_n, "longest n-gram")->check(CLI::PositiveNumber);
    cmd->add_option("--beta", *beta, "recall weight");
    cmd->callback([hyp, ref, max_n, beta] {
      std::printf("%.6f\n", metrics::chrf(*hyp, *ref, *max_n, *beta));
    });
  }

  {
    auto *cmd = met->add_subcommand("bleu", "n-gram precision score");
    auto hyp = std::make_shared<std::string>();
    auto ref = std::make_shared<std::string>();
    auto hyps_path = std::make_shared<std::string>();
    auto refs_path = std::make_shared<std::string>();
    auto tokenize = std::make_shared<std::string>("character");
    auto max_n = std::make_shared<int>(4);
    auto corpus = std::make_shared<bool>(false);
    cmd->add_option("--hyp", *hyp, "hypothesis text");
    cmd->add_option("--ref", *ref, "reference text");
    cmd->add_option("--hyps", *hyps_path, "hypothesis file, one per line");
    cmd->add_option("--refs", *refs_path, "reference file, one per line");
    cmd->add_option("--tokenize", *tokenize, "whitespace|character");
    cmd->add_option("--max-n", *max_n, "longest n-gram")->check(CLI::PositiveNumber);
    cmd->add_flag("--corpus", *corpus, "pool counts across lines");
    cmd->callback([hyp, ref, hyps_path, refs_path, tokenize, max_n, corpus] {
      metrics::Tokenize mode;
      try {
        mode = metrics::tokenize_from_string(*tokenize);
      } catch (const error &e) {
        throw usage_error(e.what());
      }
      if (hyps_path->empty() != refs_path->empty())
        throw usage_error("--hyps and --refs go together");
      if (!hyps_path->empty()) {
        std::vector<std::vector<std::string>> hyps, refs;
        LineReader hr(*hyps_path, /*skip_blank=*/false);
        LineReader rr(*refs_path, /*skip_blank=*/false);
        std::string line;
        while (hr.next(line))
          hyps.push_back(metrics::tokenize(line, mode));
        while (rr.next(line))
          refs.push_back(metrics::tokenize(line, mode));
        if (hyps.size() != refs.size())
          throw error("line counts differ: " + std::to_string(hyps.size()) +
                      " hypotheses vs " + std::to_string(refs.size()) +
                      " references");
        if (*corpus) {
          std::printf("%.6f\n", metrics::corpus_bleu(hyps, refs, *max_n));
        } else {
          for (std::size_t i = 0; i < hyps.size(); ++i)
            std::printf("%.6f\n",
                        metrics::sentence_bleu(hyps[i], refs[i], *max_n));
        }
        return;
      }
      if (hyp->empty() && ref->empty())
        throw usage_error("give --hyp/--ref or --hyps/--refs");
      std::printf("%.6f\n",
                  metrics::sentence_bleu(metrics::tokenize(*hyp, mode),
                                         metrics::tokenize(*ref, mode),
                                         *max_n));
    });
  }
}

// ------------------------------------------------------------------- mbr

void add_mbr(CLI::App &app) {
  auto *mbr_cmd = app.add_subcommand("mbr", "minimum-risk selection");
  mbr_cmd->require_subcommand(1);

  auto *cmd = mbr_cmd->add_subcommand("select", "pick consensus hypotheses");
  auto hyps = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto matrix = std::make_shared<std::string>();
  auto utility = std::make_shared<std::string>("chrf");
  auto no_multiplicity = std::make_shared<bool>(false);
  cmd->add_option("--hyps", *hyps, "hypotheses grouped by src_id (jsonl)")
      ->required();
  cmd->add_option("--out", *out, "selections (jsonl)")->required();
  cmd->add_option("--matrix", *matrix, "external utility matrix (jsonl)");
  cmd->add_option("--utility", *utility, "pairwise utility name");
  cmd->add_flag("--no-multiplicity", *no_multiplicity,
                "weight each distinct candidate once");
  cmd->callback([hyps, out, matrix, utility, no_multiplicity] {
    mbr::Utility u;
    try {
      u = mbr::utility_by_name(*utility);
    } catch (const error &e) {
      throw usage_error(e.what());
    }
    std::optional<mbr::ExternalMatrix> ext;
    if (!matrix->empty())
      ext = mbr::ExternalMatrix::load(*matrix);
    std::vector<mbr::CorpusSelection> selections =
        mbr::select_corpus(read_hypotheses(*hyps), u, !*no_multiplicity,
                           ext ? &*ext : nullptr);
    LineWriter w(*out);
    for (const mbr::CorpusSelection &s : selections) {
      nlohmann::json j{{"src_id", s.src_id}, {"text", s.text}, {"eu", s.eu}};
      w.write(j.dump());
    }
    w.close();
    note(std::to_string(selections.size()) + " selections");
  });
}

// ------------------------------------------------------------------- dnt

void add_dnt(CLI::App &app) {
  auto *dnt_cmd = app.add_subcommand("dnt", "protect untranslatable spans");
  dnt_cmd->require_subcommand(1);

  {
    auto *cmd = dnt_cmd->add_subcommand("mask", "replace spans with placeholders");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto slots = std::make_shared<std::string>();
    auto patterns = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "plain text, one segment per line")->required();
    cmd->add_option("--out", *out, "masked text")->required();
    cmd->add_option("--slots", *slots, "slot records (jsonl)")->required();
    cmd->add_option("--patterns", *patterns, "pattern config (json)");
    cmd->callback([in, out, slots, patterns] {
      dnt::PatternSet pats = load_config([&] {
        return patterns->empty() ? dnt::PatternSet{}
                                 : dnt::PatternSet::load(*patterns);
      });
      LineReader reader(*in, /*skip_blank=*/false);
      LineWriter masked(*out);
      LineWriter slot_out(*slots);
      std::string line;
      std::uint64_t spans = 0;
      while (reader.next(line)) {
        dnt::DntSegment seg = dnt::mask(line, pats);
        spans += seg.slots.size();
        masked.write(seg.masked);
        slot_out.write(dnt::serialize(seg));
      }
      masked.close();
      slot_out.close();
      note(std::to_string(spans) + " spans masked");
    });
  }

  {
    auto *cmd = dnt_cmd->add_subcommand("unmask", "restore protected spans");
    auto in = std::make_shared<std::string>();
    auto slots = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "translated text, one segment per line")
        ->required();
    cmd->add_option("--slots", *slots, "slot records from mask (jsonl)")
        ->required();
    cmd->add_option("--out", *out, "restored text")->required();
    cmd->callback([in, slots, out] {
      LineReader reader(*in, /*skip_blank=*/false);
      LineReader slot_in(*slots, /*skip_blank=*/false);
      LineWriter writer(*out);
      std::string line, slot_line;
      std::uint64_t lost = 0;
      while (reader.next(line)) {
        if (!slot_in.next(slot_line))
          throw error("more text lines than slot records");
        dnt::UnmaskResult res = dnt::unmask(line, dnt::parse_segment(slot_line));
        lost += res.lost_placeholders;
        writer.write(res.text);
      }
      if (slot_in.next(slot_line))
        throw error("more slot records than text lines");
      writer.close();
      if (lost)
        note(std::to_string(lost) + " placeholders restored at segment end");
    });
  }
}

// -------------------------------------------------------------- pipeline

void add_pipeline(CLI::App &app) {
  auto *pipe = app.add_subcommand("pipeline", "run staged configs");
  pipe->require_subcommand(1);

  {
    auto *cmd = pipe->add_subcommand("run", "execute a pipeline config");
    auto config = std::make_shared<std::string>();
    cmd->add_option("--config", *config, "pipeline config (json)")->required();
    cmd->callback([config] {
      pipeline::PipelineConfig cfg =
          load_config([&] { return pipeline::PipelineConfig::load(*config); });
      pipeline::RunResult res = pipeline::run_pipeline(cfg, std::cerr);
      if (res.exit_code != 0)
        throw CLI::RuntimeError(res.exit_code);
    });
  }

  {
    auto *cmd = pipe->add_subcommand("validate", "check a config, run nothing");
    auto config = std::make_shared<std::string>();
    cmd->add_option("--config", *config, "pipeline config (json)")->required();
    cmd->callback([config] {
      pipeline::PipelineConfig cfg =
          load_config([&] { return pipeline::PipelineConfig::load(*config); });
      std::vector<std::string> diags = pipeline::validate(cfg);
      for (const std::string &d : diags)
        std::cerr << d << "\n";
      if (!diags.empty())
        throw CLI::RuntimeError(2);
      note("config ok: " + std::to_string(cfg.stages.size()) + " stages");
    });
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"corpus construction and hypothesis selection toolkit"};
  app.require_subcommand(1);
  add_corpus(app);
  add_preprocess(app);
  add_augment(app);
  add_curriculum(app);
  add_llm_data(app);
  add_metrics(app);
  add_mbr(app);
  add_dnt(app);
  add_pipeline(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::RuntimeError &e) {
    return e.get_exit_code();
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  } catch (const usage_error &e) {
    std::cerr << "mtforge: " << e.what() << "\n";
    return 2;
  } catch (const mtforge::error &e) {
    std::cerr << "mtforge: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "mtforge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
