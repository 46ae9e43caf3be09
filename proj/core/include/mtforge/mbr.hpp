#pragma once

#include "mtforge/record.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mtforge::mbr {

/// One distinct candidate text: the first hypothesis seen with that text
/// plus how many raw hypotheses shared it.
struct Candidate {
  Hypothesis first;
  std::uint64_t multiplicity = 1;
};

struct HypothesisPool {
  std::string src_id;
  std::vector<Candidate> candidates; // first-seen order, texts unique
  std::uint64_t raw_count = 0;       // sum of multiplicities
};

struct SystemPool {
  std::string system;
  std::vector<Hypothesis> hyps;
};

/// Concatenates system pools in the given order and deduplicates by exact
/// text, counting multiplicity. All hypotheses must share one src_id.
HypothesisPool merge_pools(const std::vector<SystemPool> &pools);

/// Builds a pool directly from a flat hypothesis list (single combined
/// system list, e.g. one src_id group from a file).
HypothesisPool make_pool(const std::vector<Hypothesis> &hyps);

using Utility =
    std::function<double(const std::string &, const std::string &)>;

/// Built-in utility lookup; currently "chrf".
Utility utility_by_name(const std::string &name);

struct UtilityMatrix {
  std::vector<std::vector<double>> values; // [hyp][pseudo-ref]
  std::vector<std::string> texts;          // candidate texts, pool order
  std::vector<std::uint64_t> weights;      // pseudo-reference weights
};

struct EuResult {
  UtilityMatrix matrix;
  std::vector<double> eu;          // one per candidate
  std::uint64_t utility_calls = 0; // always |H|^2 for a pool of |H|
};

/// M[h][r] = utility(candidate h, candidate r); expected utility of h is
/// the weight-normalized row average, self term included. Weights are the
/// multiplicities when weight_by_multiplicity is set, else all 1.
EuResult expected_utility(const HypothesisPool &pool, const Utility &utility,
                          bool weight_by_multiplicity = true);

struct Selection {
  Hypothesis hypothesis;
  double eu = 0.0;
  std::uint64_t multiplicity = 1;
  std::size_t pool_size = 0; // distinct candidates
};

/// Argmax of expected utility; ties resolved by higher multiplicity, then
/// earlier first-seen position.
Selection mbr_select(const HypothesisPool &pool, const Utility &utility,
                     bool weight_by_multiplicity = true);

/// Externally computed utilities keyed by (src_id, hyp index, ref index),
/// indices into the deduplicated candidate pool.
class ExternalMatrix {
public:
  void insert(const std::string &src_id, std::size_t hyp_index,
              std::size_t ref_index, double value);
  static ExternalMatrix load(const std::string &path);

  /// Throws naming (src_id, h, r) when the entry is absent.
  double at(const std::string &src_id, std::size_t h, std::size_t r) const;

  std::size_t size() const { return values_.size(); }

private:
  std::map<std::string, double> values_; // "src\x1fh\x1fr" -> value
};

struct CorpusSelection {
  std::string src_id;
  std::string text;
  double eu = 0.0;
};

/// One selection per src_id group, in input order. Hypotheses must be
/// grouped by src_id (a group may not reappear). When an external matrix
/// is given it replaces the utility for every pool.
std::vector<CorpusSelection>
select_corpus(const std::vector<Hypothesis> &hyps, const Utility &utility,
              bool weight_by_multiplicity = true,
              const ExternalMatrix *external = nullptr);

} // namespace mtforge::mbr
