// Grounded Markov network: atom nodes joined by rule-instance hyperedges.
#ifndef BCG_GMN_H_
#define BCG_GMN_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bcg/fact_store.h"
#include "bcg/grounder.h"
#include "bcg/logic.h"

namespace bcg {

struct GmnNode {
  GroundAtom atom;
  bool known = false;
  bool root = false;

  friend bool operator==(const GmnNode&, const GmnNode&) = default;
};

struct GmnEdge {
  std::size_t rule_id = 0;
  std::uint32_t head = 0;
  std::vector<std::uint32_t> body;  // ordered as in the rule

  friend bool operator==(const GmnEdge&, const GmnEdge&) = default;
};

class GroundedNetwork {
 public:
  GroundedNetwork() = default;
  GroundedNetwork(std::vector<std::string> predicates, std::vector<std::size_t> arities,
                  std::vector<std::string> constants, std::vector<GmnNode> nodes, std::vector<GmnEdge> edges);

  const std::vector<std::string>& predicate_names() const { return predicates_; }
  const std::vector<std::size_t>& predicate_arities() const { return arities_; }
  const std::vector<std::string>& constant_names() const { return constants_; }
  const std::vector<GmnNode>& nodes() const { return nodes_; }
  const std::vector<GmnEdge>& edges() const { return edges_; }

  // Edges whose head is `node`, ordered by rule id, then edge index.
  std::span<const std::uint32_t> incoming(std::uint32_t node) const;
  // The same edges split into runs of equal rule id.
  std::vector<std::span<const std::uint32_t>> incoming_by_rule(std::uint32_t node) const;

  std::string atom_text(std::uint32_t node) const;

  friend bool operator==(const GroundedNetwork& a, const GroundedNetwork& b) {
    return a.predicates_ == b.predicates_ && a.arities_ == b.arities_ && a.constants_ == b.constants_ &&
           a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> predicates_;
  std::vector<std::size_t> arities_;
  std::vector<std::string> constants_;
  std::vector<GmnNode> nodes_;
  std::vector<GmnEdge> edges_;
  std::vector<std::uint32_t> incoming_offsets_;
  std::vector<std::uint32_t> incoming_;
};

// Node ids follow the result's atom ids. `store` supplies the known flags.
GroundedNetwork build_gmn(const GroundingResult& result, const FactStore& store, const SymbolTable& symbols);

struct GmnStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t known_nodes = 0;
  std::size_t root_nodes = 0;
  std::map<std::size_t, std::size_t> edges_per_rule;
  std::size_t max_in_degree = 0;
};

GmnStats gmn_stats(const GroundedNetwork& net);

inline constexpr int kGmnFormatVersion = 1;

// Text format described in docs/gmn-format.md. Throws FormatError.
void export_gmn(const GroundedNetwork& net, std::ostream& out);
GroundedNetwork import_gmn(std::istream& in);
void export_gmn_file(const GroundedNetwork& net, const std::string& path);
GroundedNetwork import_gmn_file(const std::string& path);

}  // namespace bcg

#endif  // BCG_GMN_H_
