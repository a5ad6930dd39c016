// Link-prediction ranking metrics and ablation-split construction.
#ifndef BCG_EVAL_H_
#define BCG_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcg/fact_store.h"
#include "bcg/kge.h"
#include "bcg/logic.h"

namespace bcg {

enum class Side { head, tail, both };

std::optional<Side> parse_side(std::string_view name);
std::string_view side_name(Side side);

// 1 + #{c > query} + #{c == query} / 2. Throws Error on an empty candidate set.
double rank_query(double query, std::span<const double> candidates);

struct RankingReport {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::vector<double> ranks;  // per test triple: head rank, then tail rank
  Side side = Side::both;
  bool filtered = true;
  std::size_t runs = 1;
  std::size_t queries = 0;       // test triples evaluated
  std::size_t excluded_oov = 0;  // test triples with an entity outside the vocabulary
};

RankingReport summarize_ranks(std::vector<double> ranks, Side side, bool filtered);

// Metric means over runs; ranks are concatenated.
RankingReport average_reports(std::span<const RankingReport> reports);

using TripleScorer = std::function<double(const Triple&)>;

struct EvalOptions {
  Side side = Side::both;
  bool filtered = true;
  // Rank against this many random corruptions per side instead of all.
  std::optional<std::size_t> sampled_corruptions;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// Corrupts each test triple's head and/or tail with every entity in
// `entities` (or a sample of them). Known-true corruptions from `filter` are
// skipped unless raw ranking is requested. Test triples mentioning an entity
// outside `entities` are excluded and counted.
RankingReport evaluate(const TripleScorer& scorer, std::span<const Triple> test, std::span<const std::uint32_t> entities,
                       const std::set<Triple>& filter, const EvalOptions& options);

// The corruptions `evaluate` would score for one test triple and side.
std::vector<Triple> corruptions(const Triple& t, bool head, std::span<const std::uint32_t> entities,
                                const std::set<Triple>& filter, const EvalOptions& options, std::size_t query_index);

void write_report_text(const RankingReport& report, std::ostream& out);
std::string report_json(const RankingReport& report);

struct AblationOptions {
  std::size_t hops = 1;
  std::size_t queries = 24;
  std::uint64_t seed = 0;
  // Candidate queries; all facts of the target predicate when empty.
  std::function<bool(const GroundAtom&)> query_filter;
  // Also withhold every other target-predicate fact about the query subject.
  bool withhold_subject_facts = false;
};

struct AblationSplit {
  std::vector<GroundAtom> train;
  std::vector<GroundAtom> queries;
  std::vector<GroundAtom> removed;  // withheld from train, queries excluded
};

// Picks queries that BC_{1,k} proves from the reduced facts while
// BC_{1,k-1} does not, removing shallower support greedily. Every query is
// certified with the oracle. Throws Error when k is 0 or too few queries
// qualify.
AblationSplit build_ablation_split(const Theory& rules, std::span<const GroundAtom> facts, PredicateId target,
                                   const AblationOptions& options);

}  // namespace bcg

#endif  // BCG_EVAL_H_
