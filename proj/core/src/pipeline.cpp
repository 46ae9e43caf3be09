#include "mtforge/pipeline.hpp"

#include "mtforge/augment.hpp"
#include "mtforge/curriculum.hpp"
#include "mtforge/dnt.hpp"
#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/llm_data.hpp"
#include "mtforge/mbr.hpp"
#include "mtforge/preprocess.hpp"
#include "mtforge/rng.hpp"
#include "mtforge/scores.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace mtforge::pipeline {

using nlohmann::json;

const ParamValue *Params::find(const std::string &name) const {
  if (!values_)
    return nullptr;
  auto it = values_->find(name);
  return it == values_->end() ? nullptr : &it->second;
}

bool Params::has(const std::string &name) const { return find(name); }

std::string Params::get_string(const std::string &name,
                               const std::string &fallback) const {
  const ParamValue *v = find(name);
  if (!v)
    return fallback;
  if (const auto *s = std::get_if<std::string>(v))
    return *s;
  throw error("parameter \"" + name + "\" must be a string");
}

std::int64_t Params::get_int(const std::string &name,
                             std::int64_t fallback) const {
  const ParamValue *v = find(name);
  if (!v)
    return fallback;
  if (const auto *i = std::get_if<std::int64_t>(v))
    return *i;
  throw error("parameter \"" + name + "\" must be an integer");
}

double Params::get_real(const std::string &name, double fallback) const {
  const ParamValue *v = find(name);
  if (!v)
    return fallback;
  if (const auto *d = std::get_if<double>(v))
    return *d;
  if (const auto *i = std::get_if<std::int64_t>(v))
    return static_cast<double>(*i);
  throw error("parameter \"" + name + "\" must be a number");
}

bool Params::get_bool(const std::string &name, bool fallback) const {
  const ParamValue *v = find(name);
  if (!v)
    return fallback;
  if (const auto *b = std::get_if<bool>(v))
    return *b;
  throw error("parameter \"" + name + "\" must be a boolean");
}

PipelineConfig PipelineConfig::from_json(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw error("pipeline config is not a valid object");
  PipelineConfig cfg;
  for (const auto &[key, value] : j.items()) {
    if (key == "seed")
      cfg.seed = value.get<std::uint64_t>();
    else if (key == "shards")
      cfg.shards = value.get<unsigned>();
    else if (key == "report")
      cfg.report = value.get<std::string>();
    else if (key == "stages") {
      if (!value.is_array())
        throw error("\"stages\" must be an array");
      for (const auto &sj : value) {
        if (!sj.is_object())
          throw error("stage entry is not an object");
        StageConfig stage;
        for (const auto &[skey, sval] : sj.items()) {
          if (skey == "name")
            stage.name = sval.get<std::string>();
          else if (skey == "module")
            stage.module = sval.get<std::string>();
          else if (skey == "op")
            stage.op = sval.get<std::string>();
          else if (skey == "in" || skey == "out") {
            if (!sval.is_object())
              throw error("stage \"" + skey + "\" must be an object");
            auto &dest = skey == "in" ? stage.in : stage.out;
            for (const auto &[name, path] : sval.items())
              dest[name] = path.get<std::string>();
          } else if (skey == "params") {
            if (!sval.is_object())
              throw error("stage \"params\" must be an object");
            for (const auto &[name, pv] : sval.items()) {
              if (pv.is_string())
                stage.params[name] = pv.get<std::string>();
              else if (pv.is_boolean())
                stage.params[name] = pv.get<bool>();
              else if (pv.is_number_integer())
                stage.params[name] = pv.get<std::int64_t>();
              else if (pv.is_number())
                stage.params[name] = pv.get<double>();
              else
                throw error("parameter \"" + name + "\" must be a scalar");
            }
          } else
            throw error("unknown stage key \"" + skey + "\"");
        }
        if (stage.module.empty() || stage.op.empty())
          throw error("stage needs \"module\" and \"op\"");
        if (stage.name.empty())
          stage.name = "stage-" + std::to_string(cfg.stages.size() + 1);
        cfg.stages.push_back(std::move(stage));
      }
    } else
      throw error("unknown pipeline key \"" + key + "\"");
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const std::string &StageContext::in(const std::string &name) const {
  auto it = config->in.find(name);
  if (it == config->in.end())
    throw error("stage \"" + config->name + "\" has no input \"" + name +
                "\"");
  return it->second;
}

const std::string &StageContext::out(const std::string &name) const {
  auto it = config->out.find(name);
  if (it == config->out.end())
    throw error("stage \"" + config->name + "\" has no output \"" + name +
                "\"");
  return it->second;
}

bool StageContext::has_in(const std::string &name) const {
  return config->in.count(name) > 0;
}

bool StageContext::has_out(const std::string &name) const {
  return config->out.count(name) > 0;
}

namespace {

std::uint64_t stage_seed(const StageContext &ctx) {
  return rng::derive(ctx.seed, static_cast<std::uint64_t>(ctx.stage_index));
}

void run_corpus_attach(StageContext &ctx) {
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  auto table = ScoreTable::load(ctx.in("scores"));
  AttachResult res = attach_scores(std::move(pairs), table);
  if (res.orphan_scores > 0)
    ctx.manifest.bump("orphan_scores", res.orphan_scores);
  write_pairs(ctx.out("pairs"), res.pairs);
  ctx.records_out = res.pairs.size();
}

void run_corpus_validate(StageContext &ctx) {
  RecordKind kind = kind_from_string(
      ctx.params.get_string("kind", "pairs"));
  std::size_t n = validate_corpus(ctx.in("data"), kind);
  ctx.records_in = ctx.records_out = n;
}

void run_preprocess(StageContext &ctx) {
  preprocess::FilterConfig cfg;
  if (ctx.has_in("config"))
    cfg = preprocess::FilterConfig::load(ctx.in("config"));
  auto stages =
      preprocess::parse_stage_list(ctx.params.get_string("stages", ""));
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  if (ctx.has_in("scores")) {
    auto table = ScoreTable::load(ctx.in("scores"));
    AttachResult res = attach_scores(std::move(pairs), table);
    if (res.orphan_scores > 0)
      ctx.manifest.bump("orphan_scores", res.orphan_scores);
    pairs = std::move(res.pairs);
  }
  pairs = preprocess::run_chain(std::move(pairs), cfg, stages, ctx.manifest,
                                ctx.shards);
  write_pairs(ctx.out("pairs"), pairs);
  ctx.records_out = pairs.size();
}

void run_augment_bit(StageContext &ctx) {
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  auto out = augment::bit_reconstruct(pairs);
  augment::count_origins(out, ctx.manifest);
  write_pairs(ctx.out("pairs"), out);
  ctx.records_out = out.size();
}

void run_augment_dd(StageContext &ctx) {
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  auto forward = augment::TranslationBatch::load(ctx.in("forward"), "forward");
  auto backward =
      augment::TranslationBatch::load(ctx.in("backward"), "backward");
  auto out = augment::dd_merge(pairs, forward, backward, &ctx.manifest);
  augment::count_origins(out, ctx.manifest);
  write_pairs(ctx.out("pairs"), out);
  ctx.records_out = out.size();
}

void run_augment_ft(StageContext &ctx) {
  auto mono = read_mono(ctx.in("mono"));
  auto authentic = read_pairs(ctx.in("authentic"));
  ctx.records_in = mono.size() + authentic.size();
  auto batch =
      augment::TranslationBatch::load(ctx.in("translations"), "teacher");
  auto out = augment::ft_build(mono, batch, authentic);
  augment::count_origins(out, ctx.manifest);
  write_pairs(ctx.out("pairs"), out);
  ctx.records_out = out.size();
}

void run_augment_sample(StageContext &ctx) {
  auto mono = read_mono(ctx.in("mono"));
  ctx.records_in = mono.size();
  std::int64_t n = ctx.params.get_int("n", 0);
  if (n < 0)
    throw error("parameter \"n\" must be >= 0");
  auto out = augment::mono_sample(mono, static_cast<std::size_t>(n),
                                  stage_seed(ctx));
  write_mono(ctx.out("mono"), out);
  ctx.records_out = out.size();
}

void run_augment_bt_tag(StageContext &ctx) {
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  auto out = augment::bt_tag(std::move(pairs),
                             ctx.params.get_string("tag", "<BT>"),
                             &ctx.manifest);
  write_pairs(ctx.out("pairs"), out);
  ctx.records_out = out.size();
}

void run_augment_at_schedule(StageContext &ctx) {
  std::int64_t total = ctx.params.get_int("total_steps", 0);
  std::int64_t syn = ctx.params.get_int("synthetic_len", 0);
  std::int64_t auth = ctx.params.get_int("authentic_len", 0);
  if (total < 1 || syn < 1 || auth < 1)
    throw error("total_steps, synthetic_len, authentic_len must be >= 1");
  auto start = augment::phase_kind_from_string(
      ctx.params.get_string("start_with", "synthetic"));
  auto sched = augment::at_schedule(static_cast<std::uint64_t>(total),
                                    static_cast<std::uint64_t>(syn),
                                    static_cast<std::uint64_t>(auth), start);
  sched.save(ctx.out("schedule"));
  ctx.records_out = sched.phases.size();
}

void run_augment_tel(StageContext &ctx) {
  auto sources = read_mono(ctx.in("sources"));
  ctx.records_in = sources.size();
  std::vector<augment::TranslationBatch> batches;
  for (const auto &[name, path] : ctx.config->in)
    if (name != "sources")
      batches.push_back(augment::TranslationBatch::load(path, name));
  auto out = augment::tel_build(sources, batches);
  augment::count_origins(out, ctx.manifest);
  write_pairs(ctx.out("pairs"), out);
  ctx.records_out = out.size();
}

void run_curriculum_score(StageContext &ctx) {
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  if (ctx.has_in("scores")) {
    auto table = ScoreTable::load(ctx.in("scores"));
    AttachResult res = attach_scores(std::move(pairs), table);
    if (res.orphan_scores > 0)
      ctx.manifest.bump("orphan_scores", res.orphan_scores);
    pairs = std::move(res.pairs);
  }
  std::int64_t buckets = ctx.params.get_int("buckets", 1);
  if (buckets < 1)
    throw error("parameter \"buckets\" must be >= 1");
  auto items = curriculum::rank_and_bucket(
      curriculum::inputs_from_pairs(pairs),
      static_cast<std::size_t>(buckets));
  curriculum::write_items(ctx.out("items"), items);
  ctx.records_out = items.size();
}

void run_curriculum_sample(StageContext &ctx) {
  auto items = curriculum::read_items(ctx.in("items"));
  ctx.records_in = items.size();
  auto plan = curriculum::SamplingPlan::load(ctx.in("plan"));
  std::int64_t steps = ctx.params.get_int("steps", 0);
  if (steps < 1)
    throw error("parameter \"steps\" must be >= 1");
  auto batches = curriculum::sample_batches(
      items, plan, static_cast<std::uint64_t>(steps));
  curriculum::write_batches(ctx.out("batches"), batches);
  ctx.records_out = batches.size();
}

void run_llm_data_pack(StageContext &ctx) {
  auto mono = read_mono(ctx.in("mono"));
  ctx.records_in = mono.size();
  std::int64_t cap = ctx.params.get_int("cap", 4096);
  if (cap < 1)
    throw error("parameter \"cap\" must be >= 1");
  auto packs = llm_data::pack_cpt(mono, static_cast<std::uint64_t>(cap));
  std::uint64_t truncated = 0;
  for (const auto &p : packs)
    if (p.truncated)
      ++truncated;
  if (truncated > 0)
    ctx.manifest.bump("truncated_packs", truncated);
  llm_data::write_packed(ctx.out("packed"), packs);
  ctx.records_out = packs.size();
}

void run_llm_data_sft(StageContext &ctx) {
  auto pairs = read_pairs(ctx.in("pairs"));
  ctx.records_in = pairs.size();
  double threshold = ctx.params.get_real("threshold", 0.8);
  auto kept = llm_data::filter_sft(std::move(pairs), threshold, &ctx.manifest);
  write_pairs(ctx.out("pairs"), kept);
  if (ctx.has_out("rendered")) {
    if (!ctx.has_in("template"))
      throw error("rendered output needs a template input");
    auto tmpl = llm_data::PromptTemplate::load(ctx.in("template"),
                                               llm_data::TemplateStage::sft);
    std::string src_lang = ctx.params.get_string("src_lang", "en");
    std::string tgt_lang = ctx.params.get_string("tgt_lang", "zh");
    LineWriter w(ctx.out("rendered"));
    for (const SentencePair &p : kept) {
      json j{{"id", p.id},
             {"text", llm_data::render(
                          tmpl, llm_data::render_values(p, src_lang,
                                                        tgt_lang))}};
      w.write(j.dump());
    }
    w.close();
  }
  ctx.records_out = kept.size();
}

void run_llm_data_cpo(StageContext &ctx) {
  auto sources = read_pairs(ctx.in("sources"));
  auto hyps = read_hypotheses(ctx.in("hyps"));
  ctx.records_in = hyps.size();
  std::int64_t n_expected = ctx.params.get_int("n_expected", 10);
  if (n_expected < 2)
    throw error("parameter \"n_expected\" must be >= 2");
  auto triplets = llm_data::build_cpo_triplets(
      sources, hyps, static_cast<std::size_t>(n_expected), &ctx.manifest);
  llm_data::write_triplets(ctx.out("triplets"), triplets);
  ctx.records_out = triplets.size();
}

void run_mbr_select(StageContext &ctx) {
  auto hyps = read_hypotheses(ctx.in("hyps"));
  ctx.records_in = hyps.size();
  bool multiplicity = ctx.params.get_bool("multiplicity", true);
  std::vector<mbr::CorpusSelection> selections;
  if (ctx.has_in("matrix")) {
    auto matrix = mbr::ExternalMatrix::load(ctx.in("matrix"));
    selections = mbr::select_corpus(hyps, nullptr, multiplicity, &matrix);
  } else {
    auto utility =
        mbr::utility_by_name(ctx.params.get_string("utility", "chrf"));
    selections = mbr::select_corpus(hyps, utility, multiplicity);
  }
  LineWriter w(ctx.out("selections"));
  for (const auto &sel : selections) {
    json j{{"src_id", sel.src_id}, {"text", sel.text}, {"eu", sel.eu}};
    w.write(j.dump());
  }
  w.close();
  ctx.records_out = selections.size();
}

void run_dnt_mask(StageContext &ctx) {
  dnt::PatternSet patterns;
  if (ctx.has_in("patterns"))
    patterns = dnt::PatternSet::load(ctx.in("patterns"));
  LineReader lines(ctx.in("text"), /*skip_blank=*/false);
  LineWriter masked(ctx.out("masked"));
  LineWriter slots(ctx.out("slots"));
  std::string line;
  std::uint64_t n = 0, total_slots = 0;
  while (lines.next(line)) {
    dnt::DntSegment seg = dnt::mask(line, patterns);
    masked.write(seg.masked);
    slots.write(dnt::serialize(seg));
    total_slots += seg.slots.size();
    ++n;
  }
  masked.close();
  slots.close();
  ctx.records_in = ctx.records_out = n;
  if (total_slots > 0)
    ctx.manifest.bump("masked_spans", total_slots);
}

void run_dnt_unmask(StageContext &ctx) {
  LineReader lines(ctx.in("text"), /*skip_blank=*/false);
  LineReader slot_lines(ctx.in("slots"), /*skip_blank=*/false);
  LineWriter out(ctx.out("text"));
  std::string line, slot_line;
  std::uint64_t n = 0, lost = 0;
  while (lines.next(line)) {
    if (!slot_lines.next(slot_line))
      throw error("slots file ended at line " + std::to_string(n + 1) +
                  " but translations continue");
    dnt::DntSegment seg = dnt::parse_segment(slot_line);
    dnt::UnmaskResult res = dnt::unmask(line, seg);
    out.write(res.text);
    lost += res.lost_placeholders;
    ++n;
  }
  if (slot_lines.next(slot_line))
    throw error("translations ended at line " + std::to_string(n) +
                " but slots continue");
  out.close();
  ctx.records_in = ctx.records_out = n;
  if (lost > 0)
    ctx.manifest.bump("lost_placeholders", lost);
}

std::map<std::string, StageSpec> build_registry() {
  std::map<std::string, StageSpec> reg;
  reg["corpus.attach"] = {{"pairs", "scores"}, {}, false, {"pairs"}, {}, {},
                          {}, run_corpus_attach};
  reg["corpus.validate"] = {{"data"},
                            {},
                            false,
                            {},
                            {},
                            {{"kind", ParamType::string}},
                            {},
                            run_corpus_validate};
  reg["preprocess.run"] = {{"pairs"},
                           {"scores", "config"},
                           false,
                           {"pairs"},
                           {"manifest"},
                           {{"stages", ParamType::string}},
                           {"stages"},
                           run_preprocess};
  reg["augment.bit"] = {{"pairs"}, {}, false, {"pairs"}, {"manifest"}, {},
                        {}, run_augment_bit};
  reg["augment.dd"] = {{"pairs", "forward", "backward"},
                       {},
                       false,
                       {"pairs"},
                       {"manifest"},
                       {},
                       {},
                       run_augment_dd};
  reg["augment.ft"] = {{"mono", "translations", "authentic"},
                       {},
                       false,
                       {"pairs"},
                       {"manifest"},
                       {},
                       {},
                       run_augment_ft};
  reg["augment.sample"] = {{"mono"},
                           {},
                           false,
                           {"mono"},
                           {},
                           {{"n", ParamType::integer}},
                           {"n"},
                           run_augment_sample};
  reg["augment.bt-tag"] = {{"pairs"},
                           {},
                           false,
                           {"pairs"},
                           {"manifest"},
                           {{"tag", ParamType::string}},
                           {},
                           run_augment_bt_tag};
  reg["augment.at-schedule"] = {{},
                                {},
                                false,
                                {"schedule"},
                                {},
                                {{"total_steps", ParamType::integer},
                                 {"synthetic_len", ParamType::integer},
                                 {"authentic_len", ParamType::integer},
                                 {"start_with", ParamType::string}},
                                {"total_steps", "synthetic_len",
                                 "authentic_len"},
                                run_augment_at_schedule};
  reg["augment.tel"] = {{"sources"}, {},        true, {"pairs"},
                        {"manifest"}, {},       {},   run_augment_tel};
  reg["curriculum.score"] = {{"pairs"},
                             {"scores"},
                             false,
                             {"items"},
                             {"manifest"},
                             {{"buckets", ParamType::integer}},
                             {},
                             run_curriculum_score};
  reg["curriculum.sample"] = {{"items", "plan"},
                              {},
                              false,
                              {"batches"},
                              {},
                              {{"steps", ParamType::integer}},
                              {"steps"},
                              run_curriculum_sample};
  reg["llm-data.pack"] = {{"mono"},
                          {},
                          false,
                          {"packed"},
                          {"manifest"},
                          {{"cap", ParamType::integer}},
                          {},
                          run_llm_data_pack};
  reg["llm-data.sft"] = {{"pairs"},
                         {"template"},
                         false,
                         {"pairs"},
                         {"rendered", "manifest"},
                         {{"threshold", ParamType::real},
                          {"src_lang", ParamType::string},
                          {"tgt_lang", ParamType::string}},
                         {},
                         run_llm_data_sft};
  reg["llm-data.cpo"] = {{"sources", "hyps"},
                         {},
                         false,
                         {"triplets"},
                         {"manifest"},
                         {{"n_expected", ParamType::integer}},
                         {},
                         run_llm_data_cpo};
  reg["mbr.select"] = {{"hyps"},
                       {"matrix"},
                       false,
                       {"selections"},
                       {},
                       {{"utility", ParamType::string},
                        {"multiplicity", ParamType::boolean}},
                       {},
                       run_mbr_select};
  reg["dnt.mask"] = {{"text"},
                     {"patterns"},
                     false,
                     {"masked", "slots"},
                     {"manifest"},
                     {},
                     {},
                     run_dnt_mask};
  reg["dnt.unmask"] = {{"text", "slots"}, {},           false,
                       {"text"},          {"manifest"}, {},
                       {},                run_dnt_unmask};
  return reg;
}

bool contains(const std::vector<std::string> &names, const std::string &name) {
  for (const std::string &n : names)
    if (n == name)
      return true;
  return false;
}

const char *param_type_name(ParamType t) {
  switch (t) {
  case ParamType::string:
    return "a string";
  case ParamType::integer:
    return "an integer";
  case ParamType::real:
    return "a number";
  case ParamType::boolean:
    return "a boolean";
  }
  return "?";
}

bool param_type_ok(ParamType t, const ParamValue &v) {
  switch (t) {
  case ParamType::string:
    return std::holds_alternative<std::string>(v);
  case ParamType::integer:
    return std::holds_alternative<std::int64_t>(v);
  case ParamType::real:
    return std::holds_alternative<double>(v) ||
           std::holds_alternative<std::int64_t>(v);
  case ParamType::boolean:
    return std::holds_alternative<bool>(v);
  }
  return false;
}

} // namespace

const std::map<std::string, StageSpec> &stage_registry() {
  static const std::map<std::string, StageSpec> reg = build_registry();
  return reg;
}

std::vector<std::string> validate(const PipelineConfig &config) {
  std::vector<std::string> diags;
  if (config.stages.empty()) {
    diags.push_back("empty pipeline");
    return diags;
  }
  if (config.shards < 1)
    diags.push_back("shards must be >= 1");

  const auto &registry = stage_registry();
  std::map<std::string, std::size_t> produced; // path -> producing stage
  std::map<std::string, std::vector<std::size_t>> writers;

  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const StageConfig &stage = config.stages[i];
    std::string where =
        "stage " + std::to_string(i + 1) + " (" + stage.name + ")";
    std::string key = stage.module + "." + stage.op;
    auto spec_it = registry.find(key);
    if (spec_it == registry.end()) {
      diags.push_back(where + ": unknown operation \"" + key + "\"");
      for (const auto &[name, path] : stage.out)
        writers[path].push_back(i);
      continue;
    }
    const StageSpec &spec = spec_it->second;

    for (const std::string &name : spec.required_in)
      if (!stage.in.count(name))
        diags.push_back(where + ": missing input \"" + name + "\"");
    for (const auto &[name, path] : stage.in) {
      if (!contains(spec.required_in, name) &&
          !contains(spec.optional_in, name) && !spec.variadic_in)
        diags.push_back(where + ": unexpected input \"" + name + "\"");
      if (path == "-")
        continue;
      if (!produced.count(path) && !std::filesystem::exists(path))
        diags.push_back(where + ": input \"" + name + "\" path " + path +
                        " is neither produced by an earlier stage nor on "
                        "disk");
    }

    for (const std::string &name : spec.required_out)
      if (!stage.out.count(name))
        diags.push_back(where + ": missing output \"" + name + "\"");
    for (const auto &[name, path] : stage.out) {
      if (!contains(spec.required_out, name) &&
          !contains(spec.optional_out, name))
        diags.push_back(where + ": unexpected output \"" + name + "\"");
      produced.emplace(path, i);
      writers[path].push_back(i);
    }

    for (const std::string &name : spec.required_params)
      if (!stage.params.count(name))
        diags.push_back(where + ": missing required parameter \"" + name +
                        "\"");
    for (const auto &[name, value] : stage.params) {
      auto pt = spec.params.find(name);
      if (pt == spec.params.end()) {
        diags.push_back(where + ": unknown parameter \"" + name + "\"");
        continue;
      }
      if (!param_type_ok(pt->second, value))
        diags.push_back(where + ": parameter \"" + name + "\" must be " +
                        param_type_name(pt->second));
    }
  }

  for (const auto &[path, stage_list] : writers) {
    if (stage_list.size() < 2)
      continue;
    std::string names;
    for (std::size_t idx : stage_list) {
      if (!names.empty())
        names += " and ";
      names += "stage " + std::to_string(idx + 1) + " (" +
               config.stages[idx].name + ")";
    }
    diags.push_back(names + " both write " + path);
  }
  return diags;
}

void write_report(const RunResult &result, const PipelineConfig &config,
                  std::ostream &out) {
  out << "pipeline report\n";
  out << "seed: " << config.seed << "\n";
  out << "shards: " << config.shards << "\n";
  out << "stages run: " << result.stage_reports.size() << " of "
      << config.stages.size() << "\n";
  for (std::size_t i = 0; i < result.stage_reports.size(); ++i) {
    const StageReport &r = result.stage_reports[i];
    out << "\nstage " << (i + 1) << ": " << r.name << " (" << r.op << ")\n";
    out << "  duration_ms: " << r.duration_ms << "\n";
    out << "  records_in: " << r.records_in << "\n";
    out << "  records_out: " << r.records_out << "\n";
    for (const StageEntry &s : r.manifest.stages)
      out << "  step " << s.name << ": " << s.in << " -> " << s.out << "\n";
    for (const auto &[name, n] : r.manifest.counters)
      out << "  counter " << name << ": " << n << "\n";
    for (const auto &[name, value] : r.manifest.notes)
      out << "  note " << name << ": " << value << "\n";
    for (const auto &[origin, n] : r.manifest.origin_counts)
      out << "  origin " << origin << ": " << n << "\n";
  }
  out << "\n";
  if (result.exit_code == 0)
    out << "status: ok\n";
  else if (result.exit_code == 1)
    out << "status: failed at " << result.failed_stage << ": " << result.error
        << "\n";
  else
    out << "status: invalid configuration\n";
}

RunResult run_pipeline(const PipelineConfig &config,
                       std::ostream &report_out) {
  RunResult result;
  result.diagnostics = validate(config);
  if (!result.diagnostics.empty()) {
    result.exit_code = 2;
    write_report(result, config, report_out);
    if (config.report) {
      std::ofstream file(*config.report);
      if (file)
        write_report(result, config, file);
    }
    return result;
  }
  const auto &registry = stage_registry();
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const StageConfig &stage = config.stages[i];
    std::string key = stage.module + "." + stage.op;
    const StageSpec &spec = registry.at(key);
    StageContext ctx;
    ctx.seed = config.seed;
    ctx.shards = config.shards;
    ctx.stage_index = i;
    ctx.config = &stage;
    ctx.params = Params(&stage.params);
    auto start = std::chrono::steady_clock::now();
    try {
      spec.run(ctx);
    } catch (const std::exception &e) {
      result.exit_code = 1;
      result.failed_stage =
          "stage " + std::to_string(i + 1) + " (" + stage.name + ")";
      result.error = e.what();
      break;
    }
    auto stop = std::chrono::steady_clock::now();
    StageReport report;
    report.name = stage.name;
    report.op = key;
    report.duration_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    report.records_in = ctx.records_in;
    report.records_out = ctx.records_out;
    report.manifest = ctx.manifest;
    if (ctx.has_out("manifest"))
      ctx.manifest.save(ctx.out("manifest"));
    result.stage_reports.push_back(std::move(report));
  }
  write_report(result, config, report_out);
  if (config.report) {
    std::ofstream file(*config.report);
    if (file)
      write_report(result, config, file);
  }
  return result;
}

} // namespace mtforge::pipeline
