// Reference implementations used to check the grounder. They enumerate
// ground instances directly from the rules and the constant domain and share
// no indexing code with the production path. Only suitable for small inputs.
#ifndef BCG_ORACLE_H_
#define BCG_ORACLE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "bcg/fact_store.h"
#include "bcg/grounder.h"
#include "bcg/logic.h"

namespace bcg {

struct OracleInstance {
  std::size_t rule_id = 0;
  std::vector<ConstantId> bindings;  // HornClause::variables() order
  GroundAtom head;
  std::vector<GroundAtom> body;
  std::vector<bool> known;

  friend bool operator==(const OracleInstance&, const OracleInstance&) = default;
};

struct OracleResult {
  // Sorted by (rule_id, bindings).
  std::vector<OracleInstance> instances;
  std::set<GroundAtom> proved;
};

// Calls `fn` for every ground instance of every clause over the theory's
// constants, clause by clause, assignments in odometer order.
void for_each_hu_instance(const Theory& theory, const std::set<GroundAtom>& facts,
                          const std::function<void(const OracleInstance&)>& fn);

// Materialized form of the above. Throws BudgetError beyond `max_instances`.
std::vector<OracleInstance> enumerate_hu(const Theory& theory, const std::set<GroundAtom>& facts,
                                         std::uint64_t max_instances = 5'000'000);

// Atoms derivable from the facts by forward chaining, facts excluded.
std::set<GroundAtom> forward_closure(const Theory& theory, const std::set<GroundAtom>& facts);

// Roots provable under BC_{w,d} (certain mode) or having at least one
// admissible instance (uncertain mode).
std::set<GroundAtom> oracle_provable(const Theory& theory, const std::set<GroundAtom>& facts,
                                     const GrounderParams& params, std::span<const GroundAtom> roots);

OracleResult oracle_ground(const Theory& theory, const std::set<GroundAtom>& facts,
                           const GrounderParams& params, std::span<const GroundAtom> roots);

}  // namespace bcg

#endif  // BCG_ORACLE_H_
