#include "bcg/logic.h"

#include <algorithm>

#include "bcg/errors.h"

namespace bcg {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error("line " + std::to_string(line) +
            (column ? ", column " + std::to_string(column) : std::string()) + ": " + what),
      message_(what),
      line_(line),
      column_(column) {}

ConstantId SymbolTable::intern_constant(std::string_view name) {
  auto [it, inserted] =
      constant_ids_.try_emplace(std::string(name), ConstantId{static_cast<std::uint32_t>(constants_.size())});
  if (inserted) constants_.emplace_back(name);
  return it->second;
}

VariableId SymbolTable::intern_variable(std::string_view name) {
  auto [it, inserted] =
      variable_ids_.try_emplace(std::string(name), VariableId{static_cast<std::uint32_t>(variables_.size())});
  if (inserted) variables_.emplace_back(name);
  return it->second;
}

PredicateId SymbolTable::intern_predicate(std::string_view name, std::size_t arity) {
  auto [it, inserted] = predicate_ids_.try_emplace(
      std::string(name), PredicateId{static_cast<std::uint32_t>(predicates_.size())});
  if (inserted) {
    predicates_.emplace_back(name);
    arities_.push_back(arity);
  } else if (arities_[raw(it->second)] != arity) {
    throw Error("arity conflict for predicate '" + std::string(name) + "': declared " +
                std::to_string(arities_[raw(it->second)]) + ", used with " + std::to_string(arity));
  }
  return it->second;
}

std::optional<ConstantId> SymbolTable::find_constant(std::string_view name) const {
  auto it = constant_ids_.find(std::string(name));
  if (it == constant_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<PredicateId> SymbolTable::find_predicate(std::string_view name) const {
  auto it = predicate_ids_.find(std::string(name));
  if (it == predicate_ids_.end()) return std::nullopt;
  return it->second;
}

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](Term t) { return t.is_variable(); });
}

std::vector<VariableId> HornClause::variables() const {
  std::vector<VariableId> out;
  auto visit = [&out](const Atom& a) {
    for (Term t : a.args) {
      if (t.is_variable() && std::find(out.begin(), out.end(), t.as_variable()) == out.end()) {
        out.push_back(t.as_variable());
      }
    }
  };
  visit(head);
  for (const Atom& b : body) visit(b);
  return out;
}

std::size_t Theory::max_body_length() const {
  std::size_t b = 0;
  for (const HornClause& c : clauses) b = std::max(b, c.body.size());
  return b;
}

Substitution::Substitution(std::initializer_list<std::pair<VariableId, ConstantId>> bindings) {
  for (const auto& [v, c] : bindings) {
    if (!bind(v, c)) throw Error("variable bound twice in substitution literal");
  }
}

std::optional<ConstantId> Substitution::find(VariableId v) const {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                             [](const auto& b, VariableId x) { return b.first < x; });
  if (it == bindings_.end() || it->first != v) return std::nullopt;
  return it->second;
}

bool Substitution::bind(VariableId v, ConstantId c) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                             [](const auto& b, VariableId x) { return b.first < x; });
  if (it != bindings_.end() && it->first == v) return it->second == c;
  bindings_.insert(it, {v, c});
  return true;
}

Substitution Substitution::compose(const Substitution& outer, const Substitution& inner) {
  // Bindings are variable -> constant, so applying `outer` to the range of
  // `inner` is the identity and composition is a left-biased union.
  Substitution out = inner;
  for (const auto& [v, c] : outer.bindings_) {
    if (!out.find(v)) out.bind(v, c);
  }
  return out;
}

Atom apply_substitution(const Atom& atom, const Substitution& theta) {
  Atom out = atom;
  for (Term& t : out.args) {
    if (!t.is_variable()) continue;
    if (auto c = theta.find(t.as_variable())) t = Term::constant(*c);
  }
  return out;
}

std::optional<Substitution> match_head(const Atom& goal, const Atom& head) {
  if (goal.predicate != head.predicate || goal.args.size() != head.args.size()) return std::nullopt;
  Substitution theta;
  for (std::size_t i = 0; i < head.args.size(); ++i) {
    const Term g = goal.args[i];
    const Term h = head.args[i];
    if (g.is_variable()) return std::nullopt;
    if (h.is_constant()) {
      if (h != g) return std::nullopt;
    } else if (!theta.bind(h.as_variable(), g.as_constant())) {
      return std::nullopt;
    }
  }
  return theta;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exponent) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (__builtin_mul_overflow(out, base, &out)) {
      throw OverflowError(std::to_string(base) + "^" + std::to_string(exponent) +
                          " does not fit in 64 bits");
    }
  }
  return out;
}

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("count does not fit in 64 bits");
  return out;
}

}  // namespace

std::uint64_t herbrand_base_size(const Theory& theory, std::uint64_t n_constants) {
  std::uint64_t total = 0;
  for (std::size_t p = 0; p < theory.symbols.predicate_count(); ++p) {
    const std::size_t arity = theory.symbols.arity(PredicateId{static_cast<std::uint32_t>(p)});
    total = checked_add(total, checked_pow(n_constants, arity));
  }
  return total;
}

std::uint64_t herbrand_universe_size(const Theory& theory, std::uint64_t n_constants) {
  std::uint64_t total = 0;
  for (const HornClause& c : theory.clauses) {
    total = checked_add(total, checked_pow(n_constants, c.variables().size()));
  }
  return total;
}

}  // namespace bcg
