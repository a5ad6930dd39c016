#include "bcg/eval.h"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

#include "bcg/errors.h"
#include "bcg/grounder.h"
#include "bcg/oracle.h"
#include "json.hpp"

namespace bcg {

std::optional<Side> parse_side(std::string_view name) {
  if (name == "head") return Side::head;
  if (name == "tail") return Side::tail;
  if (name == "both") return Side::both;
  return std::nullopt;
}

std::string_view side_name(Side side) {
  switch (side) {
    case Side::head:
      return "head";
    case Side::tail:
      return "tail";
    case Side::both:
      return "both";
  }
  return "?";
}

double rank_query(double query, std::span<const double> candidates) {
  if (candidates.empty()) throw Error("rank of a query with no candidates");
  std::size_t greater = 0, equal = 0;
  for (double c : candidates) {
    if (c > query) {
      ++greater;
    } else if (c == query) {
      ++equal;
    }
  }
  return 1.0 + static_cast<double>(greater) + static_cast<double>(equal) / 2.0;
}

RankingReport summarize_ranks(std::vector<double> ranks, Side side, bool filtered) {
  RankingReport r;
  r.side = side;
  r.filtered = filtered;
  if (!ranks.empty()) {
    for (double x : ranks) {
      r.mrr += 1.0 / x;
      r.hits1 += x <= 1.0;
      r.hits3 += x <= 3.0;
      r.hits10 += x <= 10.0;
    }
    const double n = static_cast<double>(ranks.size());
    r.mrr /= n;
    r.hits1 /= n;
    r.hits3 /= n;
    r.hits10 /= n;
  }
  r.ranks = std::move(ranks);
  return r;
}

RankingReport average_reports(std::span<const RankingReport> reports) {
  RankingReport out;
  if (reports.empty()) return out;
  out.side = reports.front().side;
  out.filtered = reports.front().filtered;
  out.runs = 0;
  for (const RankingReport& r : reports) {
    out.mrr += r.mrr;
    out.hits1 += r.hits1;
    out.hits3 += r.hits3;
    out.hits10 += r.hits10;
    out.runs += r.runs;
    out.queries += r.queries;
    out.excluded_oov += r.excluded_oov;
    out.ranks.insert(out.ranks.end(), r.ranks.begin(), r.ranks.end());
  }
  const double n = static_cast<double>(reports.size());
  out.mrr /= n;
  out.hits1 /= n;
  out.hits3 /= n;
  out.hits10 /= n;
  out.queries = static_cast<std::size_t>(static_cast<double>(out.queries) / n);
  out.excluded_oov = static_cast<std::size_t>(static_cast<double>(out.excluded_oov) / n);
  return out;
}

std::vector<Triple> corruptions(const Triple& t, bool head, std::span<const std::uint32_t> entities,
                                const std::set<Triple>& filter, const EvalOptions& options, std::size_t query_index) {
  const std::uint32_t truth = head ? t.subject : t.object;
  std::vector<std::uint32_t> pool;
  pool.reserve(entities.size());
  for (std::uint32_t e : entities) {
    if (e != truth) pool.push_back(e);
  }
  if (options.sampled_corruptions && *options.sampled_corruptions < pool.size()) {
    std::mt19937_64 rng(options.seed * 0x9e3779b97f4a7c15ULL + 2 * query_index + (head ? 0 : 1));
    const std::size_t n = *options.sampled_corruptions;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + rng() % (pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    std::sort(pool.begin(), pool.end());
  }
  std::vector<Triple> out;
  out.reserve(pool.size());
  for (std::uint32_t e : pool) {
    Triple c = t;
    (head ? c.subject : c.object) = e;
    if (options.filtered && filter.count(c)) continue;
    out.push_back(c);
  }
  return out;
}

RankingReport evaluate(const TripleScorer& scorer, std::span<const Triple> test, std::span<const std::uint32_t> entities,
                       const std::set<Triple>& filter, const EvalOptions& options) {
  std::vector<std::uint32_t> vocab(entities.begin(), entities.end());
  std::sort(vocab.begin(), vocab.end());
  auto known = [&](std::uint32_t e) { return std::binary_search(vocab.begin(), vocab.end(), e); };

  std::vector<std::size_t> kept;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (known(test[i].subject) && known(test[i].object)) {
      kept.push_back(i);
    } else {
      ++excluded;
    }
  }
  const bool do_head = options.side != Side::tail;
  const bool do_tail = options.side != Side::head;
  const std::size_t per_query = (do_head ? 1 : 0) + (do_tail ? 1 : 0);
  std::vector<double> ranks(kept.size() * per_query, 0.0);

  auto rank_side = [&](const Triple& t, bool head, std::size_t index) {
    const std::vector<Triple> cands = corruptions(t, head, vocab, filter, options, index);
    if (cands.empty()) return 1.0;
    std::vector<double> scores;
    scores.reserve(cands.size());
    for (const Triple& c : cands) scores.push_back(scorer(c));
    return rank_query(scorer(t), scores);
  };
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t q = lo; q < hi; ++q) {
      const Triple& t = test[kept[q]];
      std::size_t slot = q * per_query;
      if (do_head) ranks[slot++] = rank_side(t, true, kept[q]);
      if (do_tail) ranks[slot] = rank_side(t, false, kept[q]);
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, kept.size()));
  if (jobs == 1) {
    work(0, kept.size());
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(work, kept.size() * j / jobs, kept.size() * (j + 1) / jobs);
    for (std::thread& t : threads) t.join();
  }
  RankingReport report = summarize_ranks(std::move(ranks), options.side, options.filtered);
  report.queries = kept.size();
  report.excluded_oov = excluded;
  return report;
}

void write_report_text(const RankingReport& r, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-8s %8s %8s %8s %8s %8s %6s\n", "side", "ranking", "queries", "MRR",
                "Hits@1", "Hits@3", "Hits@10", "runs");
  out << line;
  std::snprintf(line, sizeof line, "%-8s %-8s %8zu %8.4f %8.4f %8.4f %8.4f %6zu\n", std::string(side_name(r.side)).c_str(),
                r.filtered ? "filtered" : "raw", r.queries, r.mrr, r.hits1, r.hits3, r.hits10, r.runs);
  out << line;
  if (r.excluded_oov) out << "excluded (out of vocabulary): " << r.excluded_oov << "\n";
}

std::string report_json(const RankingReport& r) {
  nlohmann::ordered_json j;
  j["mrr"] = r.mrr;
  j["hits@1"] = r.hits1;
  j["hits@3"] = r.hits3;
  j["hits@10"] = r.hits10;
  j["side"] = side_name(r.side);
  j["filtered"] = r.filtered;
  j["runs"] = r.runs;
  j["queries"] = r.queries;
  j["excluded_oov"] = r.excluded_oov;
  return j.dump(2);
}

namespace {

bool proves(const Theory& rules, const std::set<GroundAtom>& facts, const GroundAtom& q, std::size_t depth) {
  if (depth == 0) return false;
  const std::vector<GroundAtom> v(facts.begin(), facts.end());
  const FactStore store(v);
  GrounderParams p;
  p.width = 1;
  p.depth = depth;
  return !ground(rules, store, p, std::span<const GroundAtom>(&q, 1)).proved.empty();
}

// A known fact of a derivable predicate used by the deepest instance of a
// shortest proof of q within `depth`, if q has such a proof.
std::optional<std::optional<GroundAtom>> shallow_support(const Theory& rules, const std::set<GroundAtom>& facts,
                                                         const GroundAtom& q, std::size_t depth,
                                                         const std::set<PredicateId>& derivable) {
  const std::vector<GroundAtom> v(facts.begin(), facts.end());
  const FactStore store(v);
  GrounderParams p;
  p.width = 1;
  p.depth = depth;
  const GroundingResult r = ground(rules, store, p, std::span<const GroundAtom>(&q, 1));
  if (r.proved.empty()) return std::nullopt;
  const std::optional<ProofTree> tree = proof_tree(r, r.roots.front());
  std::optional<GroundAtom> best;
  std::size_t best_level = 0;
  auto visit = [&](auto& self, const ProofTree& t, std::size_t level) -> void {
    const GroundRuleInstance& g = r.instances[t.instance];
    for (std::size_t k = 0; k < g.body.size(); ++k) {
      const GroundAtom& a = r.atoms[g.body[k]];
      if (g.known[k] && derivable.count(a.predicate) && (!best || level >= best_level)) {
        best = a;
        best_level = level;
      }
    }
    for (const ProofTree& c : t.children) self(self, c, level + 1);
  };
  if (tree) visit(visit, *tree, 0);
  return best;
}

}  // namespace

AblationSplit build_ablation_split(const Theory& rules, std::span<const GroundAtom> facts, PredicateId target,
                                   const AblationOptions& options) {
  const std::size_t k = options.hops;
  if (k == 0) throw Error("ablation hops must be at least 1");
  std::set<PredicateId> derivable;
  for (const HornClause& c : rules.clauses) derivable.insert(c.head.predicate);

  std::set<GroundAtom> current(facts.begin(), facts.end());
  std::vector<GroundAtom> candidates;
  for (const GroundAtom& f : current) {
    if (f.predicate == target && (!options.query_filter || options.query_filter(f))) candidates.push_back(f);
  }
  std::mt19937_64 rng(options.seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);

  std::vector<GroundAtom> accepted;
  for (const GroundAtom& q : candidates) {
    if (accepted.size() == options.queries) break;
    if (!current.count(q)) continue;
    std::set<GroundAtom> trial = current;
    trial.erase(q);
    if (options.withhold_subject_facts) {
      for (auto it = trial.begin(); it != trial.end();) {
        it = it->predicate == target && it->args.front() == q.args.front() ? trial.erase(it) : std::next(it);
      }
    }
    bool ok = true;
    while (ok && k > 1) {
      const auto support = shallow_support(rules, trial, q, k - 1, derivable);
      if (!support) break;
      if (!*support) {
        ok = false;
      } else {
        trial.erase(**support);
      }
    }
    if (!ok || !proves(rules, trial, q, k)) continue;
    const bool others_hold = std::all_of(accepted.begin(), accepted.end(), [&](const GroundAtom& a) {
      return !trial.count(a) && proves(rules, trial, a, k) && !proves(rules, trial, a, k - 1);
    });
    if (!others_hold) continue;
    current = std::move(trial);
    accepted.push_back(q);
  }
  if (accepted.size() < options.queries) {
    throw Error("only " + std::to_string(accepted.size()) + " of " + std::to_string(options.queries) +
                " requested queries need exactly " + std::to_string(k) + " reasoning steps");
  }

  GrounderParams at_k;
  at_k.width = 1;
  at_k.depth = k;
  const std::set<GroundAtom> proved = oracle_provable(rules, current, at_k, accepted);
  bool certified = proved.size() == accepted.size();
  if (k > 1) {
    GrounderParams below = at_k;
    below.depth = k - 1;
    certified = certified && oracle_provable(rules, current, below, accepted).empty();
  }
  if (!certified) throw Error("ablation split failed its provability certificate");

  AblationSplit split;
  split.queries = accepted;
  const std::set<GroundAtom> query_set(accepted.begin(), accepted.end());
  std::set<GroundAtom> seen;
  for (const GroundAtom& f : facts) {
    if (!seen.insert(f).second) continue;
    if (current.count(f)) {
      split.train.push_back(f);
    } else if (!query_set.count(f)) {
      split.removed.push_back(f);
    }
  }
  return split;
}

}  // namespace bcg
