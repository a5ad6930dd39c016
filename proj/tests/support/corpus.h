// Random small theories for property tests and the acceptance suite.
#ifndef BCG_TESTS_CORPUS_H_
#define BCG_TESTS_CORPUS_H_

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bcg/fact_store.h"
#include "bcg/grounder.h"
#include "bcg/logic.h"
#include "bcg/oracle.h"
#include "bcg/parser.h"

namespace bcg::testing {

struct Case {
  Theory theory;
  std::vector<GroundAtom> facts;
  std::vector<GroundAtom> roots;
  std::string text;

  std::set<GroundAtom> fact_set() const { return {facts.begin(), facts.end()}; }
};

// Up to `max_constants` constants, 3 binary predicates, 3 clauses with bodies
// of length 1 to 3, and 15 facts. Every clause is range restricted.
inline Case random_case(std::uint64_t seed, std::size_t max_constants = 8) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  static const char* kVars[] = {"X", "Y", "Z", "W"};
  const std::size_t n_constants = 2 + pick(max_constants - 1);
  const std::size_t n_predicates = 1 + pick(3);
  const std::size_t n_clauses = 1 + pick(3);

  std::string text;
  for (std::size_t c = 0; c < n_clauses; ++c) {
    const std::size_t body_len = 1 + pick(3);
    std::vector<std::string> used;
    std::string body;
    for (std::size_t b = 0; b < body_len; ++b) {
      std::string a = "p" + std::to_string(pick(n_predicates)) + "(";
      for (int k = 0; k < 2; ++k) {
        std::string t;
        if (pick(10) == 0) {
          t = "c" + std::to_string(pick(n_constants));
        } else {
          t = kVars[pick(4)];
          used.push_back(t);
        }
        a += (k ? "," : "") + t;
      }
      body += (b ? ", " : "") + a + ")";
    }
    std::string head = "p" + std::to_string(pick(n_predicates)) + "(";
    for (int k = 0; k < 2; ++k) {
      const std::string t = used.empty() || pick(12) == 0 ? "c" + std::to_string(pick(n_constants))
                                                          : used[pick(used.size())];
      head += (k ? "," : "") + t;
    }
    text += head + ") :- " + body + ".\n";
  }

  Case out;
  out.text = text;
  out.theory = parse_theory(text);
  for (std::size_t c = 0; c < n_constants; ++c) out.theory.symbols.intern_constant("c" + std::to_string(c));
  for (std::size_t p = 0; p < n_predicates; ++p) {
    out.theory.symbols.intern_predicate("p" + std::to_string(p), 2);
  }
  const std::size_t n_facts = pick(16);
  for (std::size_t f = 0; f < n_facts; ++f) {
    GroundAtom g{PredicateId{static_cast<std::uint32_t>(pick(n_predicates))},
                 {ConstantId{static_cast<std::uint32_t>(pick(n_constants))},
                  ConstantId{static_cast<std::uint32_t>(pick(n_constants))}}};
    out.facts.push_back(g);
  }
  std::sort(out.facts.begin(), out.facts.end());
  out.facts.erase(std::unique(out.facts.begin(), out.facts.end()), out.facts.end());
  out.roots = herbrand_base(out.theory);
  return out;
}

// Grid of (width, depth) settings; width kUnbounded stands for B.
inline std::vector<std::pair<std::size_t, std::size_t>> width_depth_grid() {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t w : {std::size_t{0}, std::size_t{1}, std::size_t{2}, kUnbounded}) {
    for (std::size_t d : {1, 2, 3}) grid.emplace_back(w, d);
  }
  return grid;
}

inline std::vector<OracleInstance> as_oracle_instances(const GroundingResult& r) {
  std::vector<OracleInstance> out;
  for (const GroundRuleInstance& g : r.instances) {
    OracleInstance o;
    o.rule_id = g.rule_id;
    o.bindings = g.bindings;
    o.head = r.atoms[g.head];
    for (AtomId b : g.body) o.body.push_back(r.atoms[b]);
    o.known = g.known;
    out.push_back(std::move(o));
  }
  return out;
}

inline std::set<GroundAtom> proved_set(const GroundingResult& r) {
  const std::vector<GroundAtom> v = provable_set(r);
  return {v.begin(), v.end()};
}

}  // namespace bcg::testing

#endif  // BCG_TESTS_CORPUS_H_
