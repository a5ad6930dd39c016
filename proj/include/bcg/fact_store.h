// Interned ground atoms and the indexed store of known facts.
#ifndef BCG_FACT_STORE_H_
#define BCG_FACT_STORE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcg/logic.h"

namespace bcg {

enum class AtomId : std::uint32_t {};
constexpr std::uint32_t raw(AtomId a) { return static_cast<std::uint32_t>(a); }

struct GroundAtom {
  PredicateId predicate{};
  std::vector<ConstantId> args;

  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

struct GroundAtomHash {
  std::size_t operator()(const GroundAtom& a) const noexcept;
};

// Throws bcg::Error if `atom` has a variable.
GroundAtom to_ground(const Atom& atom);
Atom to_atom(const GroundAtom& atom);
std::string format_ground_atom(const GroundAtom& atom, const SymbolTable& symbols);

// Dense ids in interning order.
class AtomTable {
 public:
  AtomId intern(const GroundAtom& atom);
  std::optional<AtomId> find(const GroundAtom& atom) const;
  const GroundAtom& operator[](AtomId id) const { return atoms_[raw(id)]; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<GroundAtom>& atoms() const { return atoms_; }

 private:
  std::vector<GroundAtom> atoms_;
  std::unordered_map<GroundAtom, AtomId, GroundAtomHash> ids_;
};

// Known facts with one hash index per (predicate, bound-position mask).
// Immutable once built.
class FactStore {
 public:
  FactStore() = default;
  // Duplicates are dropped; ids follow first occurrence.
  explicit FactStore(std::span<const GroundAtom> facts);

  std::size_t size() const { return atoms_.size(); }
  const GroundAtom& fact(AtomId id) const { return atoms_[id]; }
  const std::vector<GroundAtom>& facts() const { return atoms_.atoms(); }
  std::optional<AtomId> find(const GroundAtom& atom) const { return atoms_.find(atom); }
  bool contains(const GroundAtom& atom) const { return atoms_.find(atom).has_value(); }

  // Candidate facts of predicate `p` whose positions in `bound_mask` (bit i =
  // argument i) equal `args[i]`. The result may contain false positives from
  // hash collisions; it never misses a match. Ascending id order.
  std::span<const AtomId> probe(PredicateId p, std::uint32_t bound_mask,
                                std::span<const ConstantId> args) const;

  // Exactly the substitutions θ over the pattern's variables with
  // θ·pattern in the store, in ascending fact id order.
  std::vector<Substitution> lookup(const Atom& pattern) const;

  // Distinct constants occurring in some fact.
  std::size_t entity_count() const { return entity_count_; }
  std::size_t predicate_count() const;
  // 2·#facts / #entities over binary facts.
  double mean_degree() const;

 private:
  struct PredicateIndex {
    std::size_t arity = 0;
    std::vector<AtomId> all;
    // Indexed by bound-position mask; empty when the mask is not indexed.
    std::vector<std::unordered_map<std::uint64_t, std::vector<AtomId>>> by_mask;
  };

  static std::uint64_t key(std::uint32_t mask, std::span<const ConstantId> args);

  AtomTable atoms_;
  std::vector<PredicateIndex> index_;
  std::size_t entity_count_ = 0;
};

// Reads `subject TAB relation TAB object` lines, interning symbols into
// `theory`. Blank lines are skipped. Throws ParseError on a wrong column count
// or an arity conflict with the rules, reporting the 1-based line.
std::vector<GroundAtom> read_triples(std::istream& in, Theory& theory);
std::vector<GroundAtom> read_triples_file(const std::string& path, Theory& theory);

FactStore load_facts(std::istream& in, Theory& theory);
FactStore load_facts_file(const std::string& path, Theory& theory);

}  // namespace bcg

#endif  // BCG_FACT_STORE_H_
