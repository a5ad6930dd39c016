// Parameterized backward-chaining grounders BC_{w,d} and BC^u_{w,d}.
//
// A ground rule instance is admissible for a goal when its head is the goal
// and at most `w` of its body atoms (counted by position) are missing from the
// fact store. Missing body atoms become sub-goals with one less unit of depth.
//
// Certain mode (BC_{w,d}): an instance is accepted when every missing body
// atom is itself provable within the remaining depth; a goal is provable when
// at least one accepted instance derives it. With depth 1 no sub-goal can be
// proved, so only fully known bodies are accepted.
//
// Uncertain mode (BC^u_{w,d}): every admissible instance is accepted and its
// missing atoms are expanded while depth remains. Variables that occur only in
// missing atoms range over the whole constant domain.
//
// Depth counts rule applications: a proof made of one instance whose body is
// entirely known has depth 1.
#ifndef BCG_GROUNDER_H_
#define BCG_GROUNDER_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcg/fact_store.h"
#include "bcg/logic.h"

namespace bcg {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct GrounderParams {
  std::size_t width = 0;  // kUnbounded means the longest rule body.
  std::size_t depth = 1;  // >= 1; kUnbounded for unlimited depth.
  bool uncertain = false;
  // Uncertain mode only: maximum number of assignments tried for the
  // variables left free after joining the known atoms of one partial match.
  std::optional<std::uint64_t> enumeration_cap;
  std::size_t jobs = 1;

  // Throws bcg::Error on depth 0 or jobs 0.
  void validate() const;
  std::string label() const;  // e.g. "BC_{1,2}" or "BC^u_{inf,1}"
};

struct GroundRuleInstance {
  std::size_t rule_id = 0;
  // One constant per clause variable, in HornClause::variables() order.
  std::vector<ConstantId> bindings;
  AtomId head{};
  std::vector<AtomId> body;
  std::vector<bool> known;  // per body position

  std::size_t unknown_count() const;
  Substitution substitution(const HornClause& clause) const;
};

struct GroundingStats {
  std::uint64_t roots = 0;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t instances = 0;
  // Ground partial matches dropped because one more missing atom would
  // exceed the width.
  std::uint64_t rejected_by_width = 0;
  // Width-admissible instances dropped in certain mode because a missing atom
  // has no proof within the remaining depth.
  std::uint64_t rejected_by_depth = 0;
  // Uncertain mode: enumerations cut short by the enumeration cap, and the
  // number of assignments skipped because of it.
  std::uint64_t truncated_enumerations = 0;
  std::uint64_t truncated_assignments = 0;
  double wall_seconds = 0.0;
};

struct GroundingResult {
  GrounderParams params;
  std::size_t effective_width = 0;
  // Every atom referenced below, interned instance by instance (head, then
  // body) in canonical instance order, followed by isolated roots.
  AtomTable atoms;
  // Deduplicated by (rule_id, bindings) and sorted on that key.
  std::vector<GroundRuleInstance> instances;
  std::vector<AtomId> roots;              // input order, duplicates removed
  std::vector<std::size_t> proof_counts;  // accepted instances with the root as head
  std::vector<AtomId> proved;             // ascending id
  GroundingStats stats;

  bool truncated() const { return stats.truncated_enumerations > 0; }
};

struct ProofTree {
  AtomId goal{};
  std::size_t instance = 0;  // index into GroundingResult::instances
  // Sub-proofs of the instance's missing body atoms that have one.
  std::vector<ProofTree> children;

  std::size_t depth() const;
};

// All ground atoms over the theory's predicates and constants.
std::vector<GroundAtom> herbrand_base(const Theory& theory);

GroundingResult ground(const Theory& theory, const FactStore& store, const GrounderParams& params,
                       std::span<const GroundAtom> roots);

// BC^u_{inf,1} rooted at the Herbrand base. Throws BudgetError when the number
// of ground rule instances exceeds `max_instances`.
GroundingResult full_grounding(const Theory& theory, const FactStore& store,
                               std::uint64_t max_instances = 50'000'000, std::size_t jobs = 1);

// The proved roots.
std::vector<GroundAtom> provable_set(const GroundingResult& result);

// A minimum-depth proof of `root` assembled from the accepted instances, or
// nullopt if none of them derives it. In uncertain mode, missing atoms
// without a derivation are left as leaves.
std::optional<ProofTree> proof_tree(const GroundingResult& result, AtomId root);

}  // namespace bcg

#endif  // BCG_GROUNDER_H_
