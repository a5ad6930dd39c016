#include "bcg/fact_store.h"

#include <fstream>
#include <istream>
#include <unordered_set>

#include "bcg/errors.h"
#include "bcg/parser.h"

namespace bcg {
namespace {

constexpr std::size_t kMaxIndexedArity = 4;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

std::size_t GroundAtomHash::operator()(const GroundAtom& a) const noexcept {
  std::uint64_t h = raw(a.predicate);
  for (ConstantId c : a.args) h = mix(h, raw(c));
  return static_cast<std::size_t>(h);
}

GroundAtom to_ground(const Atom& atom) {
  GroundAtom g{atom.predicate, {}};
  g.args.reserve(atom.args.size());
  for (Term t : atom.args) {
    if (t.is_variable()) throw Error("atom is not ground");
    g.args.push_back(t.as_constant());
  }
  return g;
}

Atom to_atom(const GroundAtom& atom) {
  Atom a{atom.predicate, {}};
  a.args.reserve(atom.args.size());
  for (ConstantId c : atom.args) a.args.push_back(Term::constant(c));
  return a;
}

std::string format_ground_atom(const GroundAtom& atom, const SymbolTable& symbols) {
  return format_atom(to_atom(atom), symbols);
}

AtomId AtomTable::intern(const GroundAtom& atom) {
  auto [it, inserted] = ids_.try_emplace(atom, AtomId{static_cast<std::uint32_t>(atoms_.size())});
  if (inserted) atoms_.push_back(atom);
  return it->second;
}

std::optional<AtomId> AtomTable::find(const GroundAtom& atom) const {
  auto it = ids_.find(atom);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t FactStore::key(std::uint32_t mask, std::span<const ConstantId> args) {
  // Exact packing for up to two bound positions, hashed beyond.
  std::uint64_t k = 0;
  int used = 0;
  bool exact = true;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(mask & (1u << i))) continue;
    if (used < 2 && exact) {
      k = (k << 32) | raw(args[i]);
    } else {
      if (exact) k = mix(0x51ed270b27a1f4b3ULL, k);
      exact = false;
      k = mix(k, raw(args[i]));
    }
    ++used;
  }
  return k;
}

FactStore::FactStore(std::span<const GroundAtom> facts) {
  std::unordered_set<std::uint32_t> entities;
  for (const GroundAtom& f : facts) {
    const std::size_t before = atoms_.size();
    const AtomId id = atoms_.intern(f);
    if (atoms_.size() == before) continue;
    const std::uint32_t p = raw(f.predicate);
    if (index_.size() <= p) index_.resize(p + 1);
    PredicateIndex& pi = index_[p];
    if (pi.all.empty()) {
      pi.arity = f.args.size();
      if (pi.arity <= kMaxIndexedArity) {
        pi.by_mask.resize(std::size_t{1} << pi.arity);
      } else {
        pi.by_mask.resize(std::size_t{1} << kMaxIndexedArity);
      }
    }
    pi.all.push_back(id);
    for (std::uint32_t mask = 1; mask < pi.by_mask.size(); ++mask) {
      pi.by_mask[mask][key(mask, f.args)].push_back(id);
    }
    for (ConstantId c : f.args) entities.insert(raw(c));
  }
  entity_count_ = entities.size();
}

std::span<const AtomId> FactStore::probe(PredicateId p, std::uint32_t bound_mask,
                                         std::span<const ConstantId> args) const {
  if (raw(p) >= index_.size()) return {};
  const PredicateIndex& pi = index_[raw(p)];
  if (pi.all.empty()) return {};
  // Positions past the indexed arity are left for the caller to verify.
  const std::uint32_t mask = bound_mask & static_cast<std::uint32_t>(pi.by_mask.size() - 1);
  if (mask == 0) return pi.all;
  const auto& table = pi.by_mask[mask];
  auto it = table.find(key(mask, args));
  if (it == table.end()) return {};
  return it->second;
}

std::vector<Substitution> FactStore::lookup(const Atom& pattern) const {
  std::vector<Substitution> out;
  std::vector<ConstantId> args(pattern.args.size());
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (pattern.args[i].is_constant()) {
      mask |= 1u << i;
      args[i] = pattern.args[i].as_constant();
    }
  }
  for (AtomId id : probe(pattern.predicate, mask, args)) {
    const GroundAtom& f = atoms_[id];
    if (f.args.size() != pattern.args.size()) continue;
    Substitution theta;
    bool ok = true;
    for (std::size_t i = 0; ok && i < f.args.size(); ++i) {
      const Term t = pattern.args[i];
      ok = t.is_constant() ? t.as_constant() == f.args[i] : theta.bind(t.as_variable(), f.args[i]);
    }
    if (ok) out.push_back(std::move(theta));
  }
  return out;
}

std::size_t FactStore::predicate_count() const {
  std::size_t n = 0;
  for (const PredicateIndex& pi : index_) n += pi.all.empty() ? 0 : 1;
  return n;
}

double FactStore::mean_degree() const {
  if (entity_count_ == 0) return 0.0;
  std::size_t binary = 0;
  for (const PredicateIndex& pi : index_) {
    if (pi.arity == 2) binary += pi.all.size();
  }
  return 2.0 * static_cast<double>(binary) / static_cast<double>(entity_count_);
}

std::vector<GroundAtom> read_triples(std::istream& in, Theory& theory) {
  std::vector<GroundAtom> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::string_view rest = line;
    std::string_view cols[3];
    std::size_t n = 0;
    while (true) {
      const std::size_t tab = rest.find('\t');
      if (n == 3) {
        n = 4;
        break;
      }
      cols[n++] = rest.substr(0, tab);
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (n != 3) {
      throw ParseError("expected 3 tab-separated columns (subject, relation, object)", line_no);
    }
    for (std::string_view c : cols) {
      if (c.empty()) throw ParseError("empty column", line_no);
    }
    GroundAtom g;
    try {
      g.predicate = theory.symbols.intern_predicate(cols[1], 2);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    g.args = {theory.symbols.intern_constant(cols[0]), theory.symbols.intern_constant(cols[2])};
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GroundAtom> read_triples_file(const std::string& path, Theory& theory) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open fact file '" + path + "'");
  try {
    return read_triples(in, theory);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.message(), e.line(), e.column());
  }
}

FactStore load_facts(std::istream& in, Theory& theory) { return FactStore(read_triples(in, theory)); }

FactStore load_facts_file(const std::string& path, Theory& theory) {
  return FactStore(read_triples_file(path, theory));
}

}  // namespace bcg
