#include "mtforge/mbr.hpp"

#include "mtforge/error.hpp"
#include "mtforge/jsonl.hpp"
#include "mtforge/metrics.hpp"

#include <cmath>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

namespace mtforge::mbr {

namespace {

void add_to_pool(HypothesisPool &pool,
                 std::unordered_map<std::string, std::size_t> &index,
                 const Hypothesis &hyp) {
  if (pool.raw_count == 0 && pool.candidates.empty())
    pool.src_id = hyp.src_id;
  else if (hyp.src_id != pool.src_id)
    throw error("pool mixes src_ids \"" + pool.src_id + "\" and \"" +
                hyp.src_id + "\"");
  ++pool.raw_count;
  auto [it, inserted] = index.emplace(hyp.text, pool.candidates.size());
  if (inserted)
    pool.candidates.push_back({hyp, 1});
  else
    ++pool.candidates[it->second].multiplicity;
}

} // namespace

HypothesisPool merge_pools(const std::vector<SystemPool> &pools) {
  HypothesisPool pool;
  std::unordered_map<std::string, std::size_t> index;
  for (const SystemPool &sys : pools)
    for (const Hypothesis &hyp : sys.hyps)
      add_to_pool(pool, index, hyp);
  return pool;
}

HypothesisPool make_pool(const std::vector<Hypothesis> &hyps) {
  HypothesisPool pool;
  std::unordered_map<std::string, std::size_t> index;
  for (const Hypothesis &hyp : hyps)
    add_to_pool(pool, index, hyp);
  return pool;
}

Utility utility_by_name(const std::string &name) {
  if (name == "chrf")
    return [](const std::string &hyp, const std::string &ref) {
      return metrics::chrf(hyp, ref);
    };
  throw error("unknown utility \"" + name + "\"");
}

EuResult expected_utility(const HypothesisPool &pool, const Utility &utility,
                          bool weight_by_multiplicity) {
  if (pool.candidates.empty())
    throw error("pool for \"" + pool.src_id + "\" is empty");
  std::size_t n = pool.candidates.size();
  EuResult res;
  res.matrix.texts.reserve(n);
  res.matrix.weights.reserve(n);
  for (const Candidate &c : pool.candidates) {
    res.matrix.texts.push_back(c.first.text);
    res.matrix.weights.push_back(weight_by_multiplicity ? c.multiplicity : 1);
  }
  double weight_sum = 0.0;
  for (std::uint64_t w : res.matrix.weights)
    weight_sum += static_cast<double>(w);
  res.matrix.values.assign(n, std::vector<double>(n, 0.0));
  res.eu.assign(n, 0.0);
  for (std::size_t h = 0; h < n; ++h) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double u = utility(res.matrix.texts[h], res.matrix.texts[r]);
      ++res.utility_calls;
      if (!std::isfinite(u))
        throw error("utility(\"" + res.matrix.texts[h] + "\", \"" +
                    res.matrix.texts[r] + "\") is not finite");
      res.matrix.values[h][r] = u;
      acc += static_cast<double>(res.matrix.weights[r]) * u;
    }
    res.eu[h] = acc / weight_sum;
  }
  return res;
}

namespace {

Selection select_from_eu(const HypothesisPool &pool,
                         const std::vector<double> &eu) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < eu.size(); ++i) {
    if (eu[i] > eu[best] ||
        (eu[i] == eu[best] && pool.candidates[i].multiplicity >
                                  pool.candidates[best].multiplicity))
      best = i;
  }
  const Candidate &c = pool.candidates[best];
  return {c.first, eu[best], c.multiplicity, pool.candidates.size()};
}

} // namespace

Selection mbr_select(const HypothesisPool &pool, const Utility &utility,
                     bool weight_by_multiplicity) {
  EuResult res = expected_utility(pool, utility, weight_by_multiplicity);
  return select_from_eu(pool, res.eu);
}

void ExternalMatrix::insert(const std::string &src_id, std::size_t hyp_index,
                            std::size_t ref_index, double value) {
  std::string key = src_id + '\x1f' + std::to_string(hyp_index) + '\x1f' +
                    std::to_string(ref_index);
  if (!values_.emplace(std::move(key), value).second)
    throw error("duplicate matrix entry (" + src_id + ", " +
                std::to_string(hyp_index) + ", " + std::to_string(ref_index) +
                ")");
}

ExternalMatrix ExternalMatrix::load(const std::string &path) {
  using nlohmann::json;
  ExternalMatrix m;
  LineReader lines(path);
  std::string line;
  while (lines.next(line)) {
    auto fail = [&](const std::string &what) {
      return error(path + " line " + std::to_string(lines.line_number()) +
                   ": " + what);
    };
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw fail("not a valid record");
    for (const auto &[key, _] : j.items())
      if (key != "src_id" && key != "hyp_index" && key != "ref_index" &&
          key != "value")
        throw fail("unknown field \"" + key + "\"");
    if (!j.contains("src_id") || !j.contains("hyp_index") ||
        !j.contains("ref_index") || !j.contains("value"))
      throw fail("matrix record needs src_id, hyp_index, ref_index, value");
    if (!j["src_id"].is_string() || !j["hyp_index"].is_number_unsigned() ||
        !j["ref_index"].is_number_unsigned() || !j["value"].is_number())
      throw fail("matrix field has wrong type");
    double value = j["value"].get<double>();
    if (!std::isfinite(value))
      throw fail("matrix value is not finite");
    try {
      m.insert(j["src_id"].get<std::string>(),
               j["hyp_index"].get<std::size_t>(),
               j["ref_index"].get<std::size_t>(), value);
    } catch (const std::exception &e) {
      throw fail(e.what());
    }
  }
  return m;
}

double ExternalMatrix::at(const std::string &src_id, std::size_t h,
                          std::size_t r) const {
  std::string key =
      src_id + '\x1f' + std::to_string(h) + '\x1f' + std::to_string(r);
  auto it = values_.find(key);
  if (it == values_.end())
    throw error("matrix entry missing for (" + src_id + ", " +
                std::to_string(h) + ", " + std::to_string(r) + ")");
  return it->second;
}

std::vector<CorpusSelection>
select_corpus(const std::vector<Hypothesis> &hyps, const Utility &utility,
              bool weight_by_multiplicity, const ExternalMatrix *external) {
  std::vector<CorpusSelection> out;
  std::unordered_set<std::string> closed; // groups already finished
  std::size_t i = 0;
  while (i < hyps.size()) {
    const std::string src_id = hyps[i].src_id;
    if (closed.count(src_id))
      throw error("hypotheses for \"" + src_id + "\" are not contiguous");
    std::vector<Hypothesis> group;
    while (i < hyps.size() && hyps[i].src_id == src_id)
      group.push_back(hyps[i++]);
    closed.insert(src_id);

    HypothesisPool pool = make_pool(group);
    Selection sel;
    if (external) {
      // Build EU directly from the injected matrix over candidate indices.
      std::size_t n = pool.candidates.size();
      std::vector<double> eu(n, 0.0);
      double weight_sum = 0.0;
      std::vector<double> weights(n, 1.0);
      for (std::size_t r = 0; r < n; ++r) {
        if (weight_by_multiplicity)
          weights[r] =
              static_cast<double>(pool.candidates[r].multiplicity);
        weight_sum += weights[r];
      }
      for (std::size_t h = 0; h < n; ++h) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r)
          acc += weights[r] * external->at(src_id, h, r);
        eu[h] = acc / weight_sum;
      }
      sel = select_from_eu(pool, eu);
    } else {
      sel = mbr_select(pool, utility, weight_by_multiplicity);
    }
    out.push_back({src_id, sel.hypothesis.text, sel.eu});
  }
  return out;
}

} // namespace mtforge::mbr
