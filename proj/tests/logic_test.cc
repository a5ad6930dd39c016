#include <gtest/gtest.h>

#include <random>

#include "bcg/errors.h"
#include "bcg/logic.h"
#include "bcg/parser.h"
#include "support/corpus.h"

namespace bcg {
namespace {

Atom atom(SymbolTable& s, std::string_view text) { return parse_atom(text, s); }

TEST(Parser, TransitiveRule) {
  const Theory t = parse_theory("locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).");
  ASSERT_EQ(t.clauses.size(), 1u);
  const HornClause& c = t.clauses[0];
  EXPECT_EQ(t.symbols.name(c.head.predicate), "locatedIn");
  EXPECT_EQ(c.body.size(), 2u);
  EXPECT_EQ(c.rule_id, 0u);
  EXPECT_EQ(format_clause(c, t.symbols), "locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).");
}

TEST(Parser, SelfReferentialClause) {
  const Theory t = parse_theory("p(X) :- p(X).");
  ASSERT_EQ(t.clauses.size(), 1u);
  EXPECT_EQ(t.clauses[0].head, t.clauses[0].body[0]);
}

TEST(Parser, RuleIdsFollowFileOrder) {
  const Theory t = parse_theory("% comment\nb(X) :- a(X).\n\n  c(X) :- b(X). % trailing\n");
  ASSERT_EQ(t.clauses.size(), 2u);
  EXPECT_EQ(t.clauses[0].rule_id, 0u);
  EXPECT_EQ(t.symbols.name(t.clauses[1].head.predicate), "c");
}

TEST(Parser, SyntaxErrorReportsLine) {
  try {
    parse_theory("p(X :- q(X).");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GT(e.column(), 0u);
  }
  try {
    parse_theory("p(X) :- q(X).\nr(X) :- q(X)).\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Parser, RejectsArityConflict) { EXPECT_THROW(parse_theory("p(X) :- q(X,Y).\nq(X) :- p(X)."), ParseError); }

TEST(Parser, EnforcesRangeRestriction) { EXPECT_THROW(parse_theory("p(X,Z) :- q(X)."), ParseError); }

TEST(Parser, RejectsNonHornSyntax) {
  EXPECT_THROW(parse_theory("p(X) :- q(X); r(X)."), ParseError);
  EXPECT_THROW(parse_theory("p(X) :- not q(X)."), ParseError);
  EXPECT_THROW(parse_theory("p(X) :- ."), ParseError);
}

TEST(Parser, QuotedAndLowercaseConstants) {
  const Theory t = parse_theory("p(X,\"New York\") :- q(X, italy).");
  const HornClause& c = t.clauses[0];
  EXPECT_TRUE(c.head.args[1].is_constant());
  EXPECT_EQ(t.symbols.name(c.head.args[1].as_constant()), "New York");
  EXPECT_TRUE(c.body[0].args[1].is_constant());
  const Theory again = parse_theory(format_theory(t));
  EXPECT_EQ(format_theory(again), format_theory(t));
}

TEST(Parser, PrintParseFixpointOnCorpus) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const testing::Case c = testing::random_case(seed);
    const std::string once = format_theory(c.theory);
    const std::string twice = format_theory(parse_theory(once));
    ASSERT_EQ(once, twice) << c.text;
  }
}

TEST(Interning, SameNameSameId) {
  SymbolTable s;
  EXPECT_EQ(s.intern_constant("a"), s.intern_constant("a"));
  EXPECT_NE(s.intern_constant("a"), s.intern_constant("b"));
  EXPECT_EQ(s.intern_predicate("p", 2), s.intern_predicate("p", 2));
  EXPECT_THROW(s.intern_predicate("p", 3), Error);
  const Term v = Term::variable(s.intern_variable("X"));
  const Term k = Term::constant(ConstantId{raw(s.intern_variable("X"))});
  EXPECT_NE(v, k);
}

TEST(Substitution, GroundsAtom) {
  SymbolTable s;
  const Atom a = atom(s, "locIn(X,Y)");
  const Substitution theta{{s.intern_variable("X"), s.intern_constant("italy")},
                           {s.intern_variable("Y"), s.intern_constant("europe")}};
  const Atom g = apply_substitution(a, theta);
  EXPECT_TRUE(g.is_ground());
  EXPECT_EQ(g, atom(s, "locIn(italy,europe)"));
}

TEST(Substitution, GroundAtomUnchanged) {
  SymbolTable s;
  const Atom g = atom(s, "p(a,b)");
  const Substitution theta{{s.intern_variable("X"), s.intern_constant("c")}};
  EXPECT_EQ(apply_substitution(g, theta), g);
}

TEST(Substitution, PartialBinding) {
  SymbolTable s;
  const Atom a = atom(s, "p(X,Y)");
  const Atom r = apply_substitution(a, Substitution{{s.intern_variable("X"), s.intern_constant("a")}});
  EXPECT_FALSE(r.is_ground());
  EXPECT_EQ(r, atom(s, "p(a,Y)"));
}

TEST(Substitution, BindRefusesConflict) {
  Substitution t;
  EXPECT_TRUE(t.bind(VariableId{0}, ConstantId{1}));
  EXPECT_TRUE(t.bind(VariableId{0}, ConstantId{1}));
  EXPECT_FALSE(t.bind(VariableId{0}, ConstantId{2}));
  EXPECT_EQ(t.find(VariableId{0}), ConstantId{1});
}

TEST(Substitution, CompositionMatchesSequentialApplication) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    Atom a{PredicateId{0}, {}};
    for (int i = 0; i < 4; ++i) {
      a.args.push_back(rng() % 3 ? Term::variable(VariableId{static_cast<std::uint32_t>(rng() % 6)})
                                 : Term::constant(ConstantId{static_cast<std::uint32_t>(rng() % 5)}));
    }
    Substitution inner, outer;
    for (std::uint32_t v = 0; v < 6; ++v) {
      const auto r = rng() % 3;
      if (r == 0) inner.bind(VariableId{v}, ConstantId{static_cast<std::uint32_t>(rng() % 5)});
      if (r == 1) outer.bind(VariableId{v}, ConstantId{static_cast<std::uint32_t>(rng() % 5)});
    }
    EXPECT_EQ(apply_substitution(apply_substitution(a, inner), outer),
              apply_substitution(a, Substitution::compose(outer, inner)));
    Substitution third;
    third.bind(VariableId{static_cast<std::uint32_t>(rng() % 6)}, ConstantId{9});
    EXPECT_EQ(apply_substitution(a, Substitution::compose(third, Substitution::compose(outer, inner))),
              apply_substitution(a, Substitution::compose(Substitution::compose(third, outer), inner)));
  }
}

TEST(MatchHead, BindsVariables) {
  SymbolTable s;
  const auto theta = match_head(atom(s, "locIn(it,eu)"), atom(s, "locIn(X,Z)"));
  ASSERT_TRUE(theta);
  EXPECT_EQ(*theta, (Substitution{{s.intern_variable("X"), s.intern_constant("it")},
                                  {s.intern_variable("Z"), s.intern_constant("eu")}}));
}

TEST(MatchHead, RepeatedVariableConflict) {
  SymbolTable s;
  EXPECT_FALSE(match_head(atom(s, "locIn(it,eu)"), atom(s, "locIn(X,X)")));
  EXPECT_TRUE(match_head(atom(s, "locIn(it,it)"), atom(s, "locIn(X,X)")));
}

TEST(MatchHead, PredicateAndConstantMustAgree) {
  SymbolTable s;
  EXPECT_FALSE(match_head(atom(s, "neighOf(it,fr)"), atom(s, "locIn(X,Z)")));
  EXPECT_FALSE(match_head(atom(s, "locIn(it,eu)"), atom(s, "locIn(fr,Z)")));
  EXPECT_TRUE(match_head(atom(s, "locIn(it,eu)"), atom(s, "locIn(it,Z)")));
}

TEST(MatchHead, RoundTripReconstructsGoal) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Atom head{PredicateId{0}, {}}, goal{PredicateId{0}, {}};
    for (int i = 0; i < 3; ++i) {
      head.args.push_back(rng() % 4 ? Term::variable(VariableId{static_cast<std::uint32_t>(rng() % 3)})
                                    : Term::constant(ConstantId{static_cast<std::uint32_t>(rng() % 3)}));
      goal.args.push_back(Term::constant(ConstantId{static_cast<std::uint32_t>(rng() % 3)}));
    }
    const auto theta = match_head(goal, head);
    bool brute = false;
    for (std::uint32_t a = 0; a < 27 && !brute; ++a) {
      const Substitution t{{VariableId{0}, ConstantId{a % 3}}, {VariableId{1}, ConstantId{a / 3 % 3}},
                           {VariableId{2}, ConstantId{a / 9}}};
      brute = apply_substitution(head, t) == goal;
    }
    EXPECT_EQ(theta.has_value(), brute);
    if (theta) EXPECT_EQ(apply_substitution(head, *theta), goal);
  }
}

TEST(HerbrandBase, Sizes) {
  Theory three = parse_theory("a(X,Y) :- b(X,Y).\nb(X,Y) :- c(Y,X).");
  EXPECT_EQ(herbrand_base_size(three, 272), 221'952u);
  Theory unary = parse_theory("p(X) :- p(X).");
  EXPECT_EQ(herbrand_base_size(unary, 1), 1u);
  Theory two = parse_theory("a(X,Y) :- b(X,Y).");
  EXPECT_EQ(herbrand_base_size(two, 0), 0u);
}

TEST(HerbrandBase, OverflowIsReported) {
  Theory t = parse_theory("p(A,B,C,D,E) :- q(A,B,C,D,E).");
  EXPECT_THROW(herbrand_base_size(t, 1'000'000), OverflowError);
  EXPECT_EQ(herbrand_universe_size(parse_theory("p(X,Z) :- p(X,Y), p(Y,Z)."), 2), 8u);
}

}  // namespace
}  // namespace bcg
