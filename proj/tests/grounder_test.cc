#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "bcg/errors.h"
#include "bcg/grounder.h"
#include "bcg/parser.h"
#include "support/corpus.h"

namespace bcg {
namespace {

struct Kb {
  Theory theory;
  std::vector<GroundAtom> facts;

  GroundAtom atom(std::string_view text) { return to_ground(parse_atom(text, theory.symbols)); }
};

Kb make(const char* rules, std::initializer_list<const char*> facts) {
  Kb kb;
  kb.theory = parse_theory(rules);
  for (const char* f : facts) kb.facts.push_back(kb.atom(f));
  return kb;
}

GrounderParams bc(std::size_t w, std::size_t d, bool uncertain = false) {
  GrounderParams p;
  p.width = w;
  p.depth = d;
  p.uncertain = uncertain;
  return p;
}

std::set<std::string> instance_texts(const GroundingResult& r, const SymbolTable& s) {
  std::set<std::string> out;
  for (const GroundRuleInstance& g : r.instances) {
    std::string t;
    for (AtomId b : g.body) t += (t.empty() ? "" : ", ") + format_ground_atom(r.atoms[b], s);
    out.insert(t + " -> " + format_ground_atom(r.atoms[g.head], s));
  }
  return out;
}

constexpr const char* kTransitive = "p(X,Z) :- p(X,Y), p(Y,Z).";

TEST(Ground, KnownBodyInstance) {
  Kb kb = make("locIn(X,Z) :- locIn(X,Y), locIn(Y,Z).", {"locIn(it,seu)", "locIn(seu,eu)"});
  const GroundAtom root = kb.atom("locIn(it,eu)");
  const GroundingResult r = ground(kb.theory, FactStore(kb.facts), bc(0, 1), {&root, 1});
  ASSERT_EQ(r.instances.size(), 1u);
  EXPECT_EQ(r.instances[0].unknown_count(), 0u);
  EXPECT_EQ(provable_set(r), std::vector<GroundAtom>{root});
  EXPECT_EQ(r.proof_counts, std::vector<std::size_t>{1});
}

TEST(Ground, ChainNeedsDepthTwo) {
  Kb kb = make(kTransitive, {"p(a,b)", "p(b,c)", "p(c,d)"});
  const GroundAtom root = kb.atom("p(a,d)");
  const FactStore store(kb.facts);

  const GroundingResult shallow = ground(kb.theory, store, bc(0, 1), {&root, 1});
  EXPECT_TRUE(shallow.instances.empty());
  EXPECT_TRUE(provable_set(shallow).empty());

  const GroundingResult deep = ground(kb.theory, store, bc(1, 2), {&root, 1});
  EXPECT_EQ(provable_set(deep), std::vector<GroundAtom>{root});
  const std::set<std::string> expected = {
      "p(a,b), p(b,d) -> p(a,d)",
      "p(b,c), p(c,d) -> p(b,d)",
      "p(a,c), p(c,d) -> p(a,d)",
      "p(a,b), p(b,c) -> p(a,c)",
  };
  EXPECT_EQ(instance_texts(deep, kb.theory.symbols), expected);
  EXPECT_EQ(deep.proof_counts, std::vector<std::size_t>{2});
}

TEST(Ground, UncertainFullWidthOverHerbrandBase) {
  Kb kb = make(kTransitive, {});
  kb.theory.symbols.intern_constant("a");
  kb.theory.symbols.intern_constant("b");
  const std::vector<GroundAtom> roots = herbrand_base(kb.theory);
  ASSERT_EQ(roots.size(), 4u);
  const GroundingResult r = ground(kb.theory, FactStore{}, bc(kUnbounded, 1, true), roots);
  EXPECT_EQ(r.instances.size(), 8u);
  EXPECT_EQ(r.effective_width, 2u);
}

TEST(Ground, KnownFactsAreNotAutoProvable) {
  Kb kb = make(kTransitive, {"p(a,b)", "p(b,c)", "p(c,d)"});
  const GroundAtom root = kb.atom("p(a,b)");
  const GroundingResult r = ground(kb.theory, FactStore(kb.facts), bc(1, 3), {&root, 1});
  EXPECT_TRUE(provable_set(r).empty());
}

TEST(Ground, CyclicTheoryTerminatesAtUnboundedDepth) {
  Kb kb = make(kTransitive, {"p(a,b)", "p(b,a)", "p(b,c)"});
  const std::vector<GroundAtom> roots = herbrand_base(kb.theory);
  const GroundingResult r = ground(kb.theory, FactStore(kb.facts), bc(kUnbounded, kUnbounded), roots);
  std::set<std::string> proved;
  for (const GroundAtom& a : provable_set(r)) proved.insert(format_ground_atom(a, kb.theory.symbols));
  // Derived: p(a,a), p(b,b), p(a,c). Re-derivable known facts: p(a,b), p(b,a), p(b,c).
  const std::set<std::string> expected = {"p(a,a)", "p(a,b)", "p(a,c)", "p(b,a)", "p(b,b)", "p(b,c)"};
  EXPECT_EQ(proved, expected);
}

TEST(Ground, EnumerationCapIsReported) {
  Kb kb = make("q(X) :- r(X,Y), r(Y,Z), r(Z,W).", {});
  for (const char* c : {"a", "b", "c", "d", "e"}) kb.theory.symbols.intern_constant(c);
  const GroundAtom root = kb.atom("q(a)");
  GrounderParams p = bc(kUnbounded, 1, true);
  const GroundingResult full = ground(kb.theory, FactStore{}, p, {&root, 1});
  EXPECT_EQ(full.instances.size(), 125u);
  EXPECT_FALSE(full.truncated());
  p.enumeration_cap = 10;
  const GroundingResult capped = ground(kb.theory, FactStore{}, p, {&root, 1});
  EXPECT_TRUE(capped.truncated());
  EXPECT_GT(capped.stats.truncated_assignments, 0u);
  EXPECT_LE(capped.instances.size(), 10u);
}

TEST(Ground, ParamsValidationAndLabel) {
  GrounderParams p = bc(1, 2);
  EXPECT_EQ(p.label(), "BC_{1,2}");
  EXPECT_EQ(bc(kUnbounded, 1, true).label(), "BC^u_{inf,1}");
  p.depth = 0;
  EXPECT_THROW(p.validate(), Error);
  p.depth = 1;
  p.jobs = 0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(FullGrounding, FourConstantsThreeVariables) {
  Kb kb = make("locIn(Y,Z) :- locIn(X,Z), neighOf(X,Y).", {});
  for (const char* c : {"it", "fr", "es", "eu"}) kb.theory.symbols.intern_constant(c);
  EXPECT_EQ(full_grounding(kb.theory, FactStore{}).instances.size(), 64u);
}

TEST(FullGrounding, EmptyTheory) {
  Theory t;
  t.symbols.intern_constant("a");
  const GroundingResult r = full_grounding(t, FactStore{});
  EXPECT_TRUE(r.instances.empty());
  EXPECT_TRUE(r.proved.empty());
}

TEST(FullGrounding, SingletonDomain) {
  Kb kb = make(kTransitive, {});
  kb.theory.symbols.intern_constant("c");
  const GroundingResult r = full_grounding(kb.theory, FactStore{});
  ASSERT_EQ(r.instances.size(), 1u);
  EXPECT_EQ(instance_texts(r, kb.theory.symbols), std::set<std::string>{"p(c,c), p(c,c) -> p(c,c)"});
}

TEST(FullGrounding, RefusesOverBudget) {
  Kb kb = make(kTransitive, {});
  for (int i = 0; i < 30; ++i) kb.theory.symbols.intern_constant("c" + std::to_string(i));
  try {
    full_grounding(kb.theory, FactStore{}, 1000);
    FAIL() << "expected a budget refusal";
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.requested(), 27000.0);
    EXPECT_EQ(e.budget(), 1000.0);
  }
}

TEST(ProofTree, ChainProofHasDepthTwo) {
  Kb kb = make(kTransitive, {"p(a,b)", "p(b,c)", "p(c,d)"});
  const GroundAtom root = kb.atom("p(a,d)");
  const GroundingResult r = ground(kb.theory, FactStore(kb.facts), bc(1, 2), {&root, 1});
  const auto tree = proof_tree(r, r.roots[0]);
  ASSERT_TRUE(tree);
  EXPECT_EQ(tree->depth(), 2u);
  ASSERT_EQ(tree->children.size(), 1u);
  EXPECT_TRUE(tree->children[0].children.empty());
}

// Structural invariants over the random corpus.
TEST(GroundInvariants, WidthDepthAndClosure) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const testing::Case c = testing::random_case(seed);
    const FactStore store(c.facts);
    for (auto [w, d] : testing::width_depth_grid()) {
      const GroundingResult r = ground(c.theory, store, bc(w, d), c.roots);
      std::set<AtomId> heads;
      for (const GroundRuleInstance& g : r.instances) {
        ASSERT_LE(g.unknown_count(), r.effective_width);
        heads.insert(g.head);
      }
      for (const GroundRuleInstance& g : r.instances) {
        for (std::size_t k = 0; k < g.body.size(); ++k) {
          if (!g.known[k]) ASSERT_TRUE(heads.count(g.body[k])) << "seed " << seed << " " << r.params.label();
        }
      }
      for (std::size_t i = 0; i < r.roots.size(); ++i) {
        const bool proved = std::binary_search(r.proved.begin(), r.proved.end(), r.roots[i]);
        ASSERT_EQ(proved, r.proof_counts[i] > 0);
        if (!proved) continue;
        const auto tree = proof_tree(r, r.roots[i]);
        ASSERT_TRUE(tree);
        ASSERT_LE(tree->depth(), d);
      }
    }
  }
}

}  // namespace
}  // namespace bcg
