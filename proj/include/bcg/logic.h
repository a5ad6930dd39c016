// Function-free first-order symbols: constants, variables, predicates,
// atoms, Horn clauses and substitutions.
#ifndef BCG_LOGIC_H_
#define BCG_LOGIC_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bcg {

enum class ConstantId : std::uint32_t {};
enum class VariableId : std::uint32_t {};
enum class PredicateId : std::uint32_t {};

constexpr std::uint32_t raw(ConstantId c) { return static_cast<std::uint32_t>(c); }
constexpr std::uint32_t raw(VariableId v) { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t raw(PredicateId p) { return static_cast<std::uint32_t>(p); }

// Interning tables for the three symbol kinds. Constants and variables live in
// separate id spaces. A predicate's arity is fixed by its first use.
class SymbolTable {
 public:
  ConstantId intern_constant(std::string_view name);
  VariableId intern_variable(std::string_view name);
  // Throws bcg::Error if `name` was seen before with a different arity.
  PredicateId intern_predicate(std::string_view name, std::size_t arity);

  std::optional<ConstantId> find_constant(std::string_view name) const;
  std::optional<PredicateId> find_predicate(std::string_view name) const;

  const std::string& name(ConstantId c) const { return constants_[raw(c)]; }
  const std::string& name(VariableId v) const { return variables_[raw(v)]; }
  const std::string& name(PredicateId p) const { return predicates_[raw(p)]; }
  std::size_t arity(PredicateId p) const { return arities_[raw(p)]; }

  std::size_t constant_count() const { return constants_.size(); }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t predicate_count() const { return predicates_.size(); }

 private:
  std::vector<std::string> constants_;
  std::vector<std::string> variables_;
  std::vector<std::string> predicates_;
  std::vector<std::size_t> arities_;
  std::unordered_map<std::string, ConstantId> constant_ids_;
  std::unordered_map<std::string, VariableId> variable_ids_;
  std::unordered_map<std::string, PredicateId> predicate_ids_;
};

class Term {
 public:
  static Term constant(ConstantId c) { return Term(raw(c)); }
  static Term variable(VariableId v) { return Term(raw(v) | kVariableBit); }

  bool is_variable() const { return (bits_ & kVariableBit) != 0; }
  bool is_constant() const { return !is_variable(); }
  ConstantId as_constant() const { return ConstantId{bits_}; }
  VariableId as_variable() const { return VariableId{bits_ & ~kVariableBit}; }

  friend bool operator==(Term, Term) = default;
  friend auto operator<=>(Term, Term) = default;

 private:
  static constexpr std::uint32_t kVariableBit = 0x80000000u;
  explicit Term(std::uint32_t bits) : bits_(bits) {}
  std::uint32_t bits_;
};

struct Atom {
  PredicateId predicate{};
  std::vector<Term> args;

  bool is_ground() const;
  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct HornClause {
  Atom head;
  std::vector<Atom> body;
  std::size_t rule_id = 0;

  // Distinct variables in order of first occurrence, head first.
  std::vector<VariableId> variables() const;
};

struct Theory {
  SymbolTable symbols;
  std::vector<HornClause> clauses;

  // Longest body over all clauses; 0 for an empty theory.
  std::size_t max_body_length() const;
};

// Partial map from variables to constants, kept sorted by variable id.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<VariableId, ConstantId>> bindings);

  std::optional<ConstantId> find(VariableId v) const;
  // Binds v to c. Returns false (and leaves the map unchanged) if v is
  // already bound to a different constant.
  bool bind(VariableId v, ConstantId c);

  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  std::span<const std::pair<VariableId, ConstantId>> bindings() const { return bindings_; }

  // (outer ∘ inner): applying the result equals applying `inner`, then `outer`.
  static Substitution compose(const Substitution& outer, const Substitution& inner);

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::vector<std::pair<VariableId, ConstantId>> bindings_;
};

Atom apply_substitution(const Atom& atom, const Substitution& theta);

// Most general matcher θ with θ·head = goal, if any. `goal` must be ground.
std::optional<Substitution> match_head(const Atom& goal, const Atom& head);

// Σ over predicates of n_constants^arity. Throws OverflowError past 2^64-1.
std::uint64_t herbrand_base_size(const Theory& theory, std::uint64_t n_constants);

// Σ over clauses of n_constants^(#variables): the number of ground rule
// instances in the full grounding. Throws OverflowError past 2^64-1.
std::uint64_t herbrand_universe_size(const Theory& theory, std::uint64_t n_constants);

std::uint64_t checked_pow(std::uint64_t base, std::size_t exponent);

}  // namespace bcg

#endif  // BCG_LOGIC_H_
