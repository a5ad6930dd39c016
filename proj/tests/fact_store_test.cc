#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bcg/errors.h"
#include "bcg/fact_store.h"
#include "bcg/parser.h"

namespace bcg {
namespace {

struct Small {
  Theory theory;
  FactStore store;
};

Small three_facts() {
  Small s;
  std::istringstream in("it\tlocIn\tseu\nseu\tlocIn\teu\nit\tneighOf\tfr\n");
  s.store = load_facts(in, s.theory);
  return s;
}

TEST(LoadFacts, ParsesTriple) {
  Theory t;
  std::istringstream in("italy\tlocatedIn\tsouthern_europe\n");
  const FactStore store = load_facts(in, t);
  ASSERT_EQ(store.size(), 1u);
  EXPECT_EQ(format_ground_atom(store.facts()[0], t.symbols), "locatedIn(italy,southern_europe)");
}

TEST(LoadFacts, DuplicatesDropped) {
  Theory t;
  std::istringstream in("a\tp\tb\na\tp\tb\n\nb\tp\tc\n");
  EXPECT_EQ(load_facts(in, t).size(), 2u);
}

TEST(LoadFacts, MalformedLineReportsLineNumber) {
  Theory t;
  std::istringstream in("a\tp\tb\na\tp\n");
  try {
    load_facts(in, t);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadFacts, ArityConflictWithRules) {
  Theory t = parse_theory("p(X) :- q(X).");
  std::istringstream in("a\tp\tb\n");
  EXPECT_THROW(load_facts(in, t), ParseError);
}

TEST(LoadFacts, CountriesS1Counts) {
  Theory t;
  const FactStore store = load_facts_file(std::string(BCG_DEFAULT_DATA_DIR) + "/countries/s1/train.tsv", t);
  EXPECT_EQ(store.size(), 1115u);
  EXPECT_EQ(store.entity_count(), 273u);
  EXPECT_EQ(store.predicate_count(), 2u);
  EXPECT_NEAR(store.mean_degree(), 2.0 * 1115 / 273, 1e-12);
}

TEST(Lookup, BoundSubject) {
  Small s = three_facts();
  const auto subs = s.store.lookup(parse_atom("locIn(it,Y)", s.theory.symbols));
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_EQ(subs[0].find(s.theory.symbols.intern_variable("Y")), s.theory.symbols.find_constant("seu"));
}

TEST(Lookup, UnboundPattern) {
  Small s = three_facts();
  EXPECT_EQ(s.store.lookup(parse_atom("locIn(X,Y)", s.theory.symbols)).size(), 2u);
}

TEST(Lookup, NoMatch) {
  Small s = three_facts();
  EXPECT_TRUE(s.store.lookup(parse_atom("locIn(fr,Y)", s.theory.symbols)).empty());
}

TEST(Lookup, GroundPatternConsistentWithContains) {
  Small s = three_facts();
  const Atom in = parse_atom("locIn(it,seu)", s.theory.symbols);
  const Atom out = parse_atom("locIn(it,eu)", s.theory.symbols);
  EXPECT_EQ(s.store.lookup(in).size(), 1u);
  EXPECT_TRUE(s.store.lookup(in)[0].empty());
  EXPECT_TRUE(s.store.contains(to_ground(in)));
  EXPECT_TRUE(s.store.lookup(out).empty());
  EXPECT_FALSE(s.store.contains(to_ground(out)));
}

TEST(Lookup, EqualsBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t n_const = 2 + rng() % 6;
    std::vector<GroundAtom> facts;
    for (int i = 0; i < 40; ++i) {
      facts.push_back({PredicateId{static_cast<std::uint32_t>(rng() % 2)},
                       {ConstantId{static_cast<std::uint32_t>(rng() % n_const)},
                        ConstantId{static_cast<std::uint32_t>(rng() % n_const)},
                        ConstantId{static_cast<std::uint32_t>(rng() % n_const)}}});
    }
    const FactStore store(facts);
    for (int q = 0; q < 20; ++q) {
      Atom pattern{PredicateId{static_cast<std::uint32_t>(rng() % 2)}, {}};
      for (int k = 0; k < 3; ++k) {
        pattern.args.push_back(rng() % 2 ? Term::variable(VariableId{static_cast<std::uint32_t>(rng() % 2)})
                                         : Term::constant(ConstantId{static_cast<std::uint32_t>(rng() % n_const)}));
      }
      std::vector<Substitution> brute;
      for (const GroundAtom& f : store.facts()) {
        if (f.predicate != pattern.predicate) continue;
        Substitution theta;
        bool ok = true;
        for (std::size_t k = 0; k < 3 && ok; ++k) {
          const Term t = pattern.args[k];
          ok = t.is_constant() ? t.as_constant() == f.args[k] : theta.bind(t.as_variable(), f.args[k]);
        }
        if (ok) brute.push_back(theta);
      }
      EXPECT_EQ(store.lookup(pattern), brute);
    }
  }
}

TEST(Probe, NeverMissesAMatch) {
  Small s = three_facts();
  const PredicateId p = *s.theory.symbols.find_predicate("locIn");
  const ConstantId args[] = {*s.theory.symbols.find_constant("it"), ConstantId{}};
  const auto ids = s.store.probe(p, 0b01, args);
  bool found = false;
  for (AtomId id : ids) found = found || format_ground_atom(s.store.fact(id), s.theory.symbols) == "locIn(it,seu)";
  EXPECT_TRUE(found);
}

}  // namespace
}  // namespace bcg
