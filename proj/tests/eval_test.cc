#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bcg/errors.h"
#include "bcg/eval.h"
#include "bcg/experiment.h"
#include "bcg/oracle.h"
#include "bcg/parser.h"

namespace bcg {
namespace {

TEST(RankQuery, Examples) {
  const double a[] = {0.9, 0.3};
  EXPECT_EQ(rank_query(0.5, a), 2.0);
  const double b[] = {0.9, 0.8, 0.7, 0.6, 0.5, 0.5, 0.1};
  EXPECT_EQ(rank_query(0.5, b), 6.0);
  const double c[] = {0.1, 0.2};
  EXPECT_EQ(rank_query(0.5, c), 1.0);
  EXPECT_THROW(rank_query(0.5, {}), Error);
}

TEST(RankQuery, AllTiedIsMidpoint) {
  const std::vector<double> ties(9, 0.3);
  EXPECT_EQ(rank_query(0.3, ties), 5.5);
}

TEST(Summarize, Metrics) {
  const RankingReport r = summarize_ranks({1, 2, 4}, Side::both, true);
  EXPECT_NEAR(r.mrr, (1.0 + 0.5 + 0.25) / 3.0, 1e-12);
  EXPECT_NEAR(r.mrr, 0.5833, 1e-4);
  EXPECT_NEAR(r.hits1, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.hits3, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.hits10, 1.0, 1e-12);
}

TEST(Summarize, AverageOfRuns) {
  const RankingReport runs[] = {summarize_ranks({1, 1}, Side::both, true), summarize_ranks({2, 2}, Side::both, true)};
  const RankingReport avg = average_reports(runs);
  EXPECT_NEAR(avg.mrr, 0.75, 1e-12);
  EXPECT_EQ(avg.runs, 2u);
  EXPECT_EQ(avg.ranks.size(), 4u);
}

TEST(Sides, NamesRoundTrip) {
  for (Side s : {Side::head, Side::tail, Side::both}) EXPECT_EQ(parse_side(side_name(s)), s);
  EXPECT_FALSE(parse_side("left"));
}

// A scorer that knows the gold triples.
struct Toy {
  std::vector<std::uint32_t> entities = {0, 1, 2, 3, 4};
  std::vector<Triple> train = {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}};
  std::vector<Triple> test = {{0, 0, 2}, {3, 0, 4}};
  std::set<Triple> gold() const {
    std::set<Triple> g(train.begin(), train.end());
    g.insert(test.begin(), test.end());
    return g;
  }
};

TEST(Evaluate, PerfectScorerHasMrrOne) {
  const Toy toy;
  const std::set<Triple> gold = toy.gold();
  const TripleScorer oracle = [&](const Triple& t) { return gold.count(t) ? 1.0 : 0.0; };
  const RankingReport r = evaluate(oracle, toy.test, toy.entities, gold, EvalOptions{});
  EXPECT_EQ(r.mrr, 1.0);
  EXPECT_EQ(r.queries, 2u);
  EXPECT_EQ(r.ranks.size(), 4u);
}

TEST(Evaluate, FilteringRemovesKnownCorruptions) {
  const Toy toy;
  const std::set<Triple> gold = toy.gold();
  const TripleScorer oracle = [&](const Triple& t) { return gold.count(t) ? 1.0 : 0.0; };
  EvalOptions raw;
  raw.filtered = false;
  const RankingReport r = evaluate(oracle, toy.test, toy.entities, gold, raw);
  // Tail side of (0,0,2): corruption (0,0,1) is true and ties, rank 1.5.
  EXPECT_EQ(r.ranks[1], 1.5);
  EXPECT_LT(r.mrr, 1.0);
}

TEST(Evaluate, OutOfVocabularyExcluded) {
  const Toy toy;
  const std::vector<Triple> test = {{0, 0, 2}, {9, 0, 1}};
  const RankingReport r = evaluate([](const Triple&) { return 0.0; }, test, toy.entities, {}, EvalOptions{});
  EXPECT_EQ(r.queries, 1u);
  EXPECT_EQ(r.excluded_oov, 1u);
}

TEST(Evaluate, SideSelection) {
  const Toy toy;
  EvalOptions o;
  o.side = Side::tail;
  const RankingReport r = evaluate([](const Triple&) { return 0.0; }, toy.test, toy.entities, {}, o);
  EXPECT_EQ(r.ranks.size(), 2u);
}

// Filtered ranks never exceed raw ranks; sampling is deterministic and
// unaffected by the job count.
TEST(EvaluateProperties, FilteredAtMostRawAndDeterministic) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint32_t n = 4 + rng() % 20;
    std::vector<std::uint32_t> entities(n);
    for (std::uint32_t i = 0; i < n; ++i) entities[i] = i;
    std::set<Triple> known;
    std::vector<Triple> test;
    for (int i = 0; i < 30; ++i) {
      const Triple t{static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % 2),
                     static_cast<std::uint32_t>(rng() % n)};
      known.insert(t);
      if (i % 3 == 0) test.push_back(t);
    }
    const std::uint64_t salt = rng();
    const TripleScorer scorer = [&](const Triple& t) {
      return static_cast<double>((t.subject * 31 + t.relation * 7 + t.object * 13 + salt) % 5);
    };
    EvalOptions f, r;
    r.filtered = false;
    const RankingReport filtered = evaluate(scorer, test, entities, known, f);
    const RankingReport raw = evaluate(scorer, test, entities, known, r);
    ASSERT_EQ(filtered.ranks.size(), raw.ranks.size());
    for (std::size_t i = 0; i < raw.ranks.size(); ++i) ASSERT_LE(filtered.ranks[i], raw.ranks[i]);

    EvalOptions s;
    s.sampled_corruptions = 3;
    s.seed = trial;
    const RankingReport one = evaluate(scorer, test, entities, known, s);
    s.jobs = 4;
    ASSERT_EQ(evaluate(scorer, test, entities, known, s).ranks, one.ranks);
    for (std::size_t q = 0; q < test.size(); ++q) {
      const auto c = corruptions(test[q], true, entities, known, s, q);
      ASSERT_LE(c.size(), 3u);
      for (const Triple& x : c) ASSERT_FALSE(known.count(x));
    }
  }
}

TEST(Report, JsonAndText) {
  const RankingReport r = summarize_ranks({1, 3}, Side::both, true);
  const std::string json = report_json(r);
  EXPECT_NE(json.find("\"mrr\""), std::string::npos);
  std::ostringstream text;
  write_report_text(r, text);
  EXPECT_NE(text.str().find("MRR"), std::string::npos);
}

struct Countries {
  Theory theory;
  std::vector<GroundAtom> facts;
};

Countries countries() {
  const std::string dir = std::string(BCG_DEFAULT_DATA_DIR) + "/countries/";
  Dataset d = load_dataset(dir + "ablation_rules.pl", dir + "full.tsv", "", "");
  return {std::move(d.theory), std::move(d.train)};
}

TEST(Ablation, ZeroHopsRejected) {
  Countries c = countries();
  AblationOptions o;
  o.hops = 0;
  EXPECT_THROW(build_ablation_split(c.theory, c.facts, *c.theory.symbols.find_predicate("locatedIn"), o), Error);
}

TEST(Ablation, QueriesNeedExactlyKHops) {
  Countries c = countries();
  const PredicateId located = *c.theory.symbols.find_predicate("locatedIn");
  for (std::size_t k = 1; k <= 2; ++k) {
    AblationOptions o;
    o.hops = k;
    o.queries = 4;
    o.seed = 3;
    const AblationSplit split = build_ablation_split(c.theory, c.facts, located, o);
    ASSERT_EQ(split.queries.size(), 4u);
    const std::set<GroundAtom> train(split.train.begin(), split.train.end());
    for (const GroundAtom& q : split.queries) {
      EXPECT_FALSE(train.count(q));
      EXPECT_EQ(q.predicate, located);
    }
    for (const GroundAtom& r : split.removed) EXPECT_FALSE(train.count(r));
    EXPECT_EQ(split.train.size() + split.removed.size() + split.queries.size(), c.facts.size());
    GrounderParams p;
    p.width = 1;
    p.depth = k;
    EXPECT_EQ(oracle_provable(c.theory, train, p, split.queries).size(), 4u);
    if (k > 1) {
      p.depth = k - 1;
      EXPECT_TRUE(oracle_provable(c.theory, train, p, split.queries).empty());
    }
  }
}

}  // namespace
}  // namespace bcg
