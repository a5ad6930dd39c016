#include "bcg/grounder.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <deque>
#include <thread>
#include <unordered_map>

#include "bcg/errors.h"

namespace bcg {
namespace {

constexpr std::uint32_t kUnbound = 0xFFFFFFFFu;
constexpr std::uint64_t kInfinite = std::numeric_limits<std::uint64_t>::max();

std::uint64_t budget_minus_one(std::uint64_t b) { return b == kInfinite ? kInfinite : b - 1; }

struct Slot {
  bool is_var;
  std::uint32_t value;  // variable slot or constant id
};

struct CompiledAtom {
  PredicateId predicate{};
  std::vector<Slot> args;
};

struct CompiledClause {
  std::size_t rule_id = 0;
  std::size_t n_vars = 0;
  CompiledAtom head;
  std::vector<CompiledAtom> body;
};

struct Program {
  std::vector<CompiledClause> clauses;
  std::vector<std::vector<std::uint32_t>> by_head;  // predicate -> clause indices
};

CompiledAtom compile_atom(const Atom& a, const std::vector<VariableId>& vars) {
  CompiledAtom out{a.predicate, {}};
  for (Term t : a.args) {
    if (t.is_variable()) {
      const auto pos = std::find(vars.begin(), vars.end(), t.as_variable()) - vars.begin();
      out.args.push_back({true, static_cast<std::uint32_t>(pos)});
    } else {
      out.args.push_back({false, raw(t.as_constant())});
    }
  }
  return out;
}

Program compile(const Theory& theory) {
  Program p;
  p.by_head.resize(theory.symbols.predicate_count());
  for (const HornClause& c : theory.clauses) {
    if (c.body.size() > 63) throw Error("rule bodies are limited to 63 atoms");
    const std::vector<VariableId> vars = c.variables();
    CompiledClause cc;
    cc.rule_id = c.rule_id;
    cc.n_vars = vars.size();
    cc.head = compile_atom(c.head, vars);
    for (const Atom& b : c.body) cc.body.push_back(compile_atom(b, vars));
    p.by_head[raw(c.head.predicate)].push_back(static_cast<std::uint32_t>(p.clauses.size()));
    p.clauses.push_back(std::move(cc));
  }
  return p;
}

// Binds the clause head against a ground goal.
bool bind_head(const CompiledAtom& head, const GroundAtom& goal, std::vector<std::uint32_t>& bindings) {
  if (head.predicate != goal.predicate || head.args.size() != goal.args.size()) return false;
  for (std::size_t i = 0; i < head.args.size(); ++i) {
    const std::uint32_t c = raw(goal.args[i]);
    const Slot s = head.args[i];
    if (!s.is_var) {
      if (s.value != c) return false;
    } else if (bindings[s.value] == kUnbound) {
      bindings[s.value] = c;
    } else if (bindings[s.value] != c) {
      return false;
    }
  }
  return true;
}

GroundAtom instantiate(const CompiledAtom& a, const std::vector<std::uint32_t>& bindings) {
  GroundAtom g{a.predicate, {}};
  g.args.reserve(a.args.size());
  for (Slot s : a.args) g.args.push_back(ConstantId{s.is_var ? bindings[s.value] : s.value});
  return g;
}

struct Candidate {
  std::uint32_t clause = 0;
  std::vector<std::uint32_t> bindings;
  std::vector<GroundAtom> missing;  // by body position
};

struct InstanceKey {
  std::uint32_t clause;
  std::vector<std::uint32_t> bindings;
  friend bool operator==(const InstanceKey&, const InstanceKey&) = default;
  friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
};

// Enumerates the width-admissible ground instances whose head is a goal.
class Expander {
 public:
  Expander(const Program& program, const FactStore& store, std::span<const ConstantId> domain,
           const GrounderParams& params, GroundingStats& stats)
      : program_(program), store_(store), domain_(domain), params_(params), stats_(stats) {}

  void expand(const GroundAtom& goal, std::size_t width, std::vector<Candidate>& out) {
    ++stats_.nodes_expanded;
    out_ = &out;
    width_ = width;
    if (raw(goal.predicate) >= program_.by_head.size()) return;
    for (std::uint32_t ci : program_.by_head[raw(goal.predicate)]) {
      clause_ = &program_.clauses[ci];
      clause_index_ = ci;
      bindings_.assign(clause_->n_vars, kUnbound);
      if (!bind_head(clause_->head, goal, bindings_)) continue;
      join(0, 0, 0);
    }
  }

 private:
  // Could a rule derive this atom? Necessary condition for a missing atom to
  // have a proof.
  bool derivable_shape(const GroundAtom& a) const {
    if (raw(a.predicate) >= program_.by_head.size()) return false;
    for (std::uint32_t ci : program_.by_head[raw(a.predicate)]) {
      scratch_.assign(program_.clauses[ci].n_vars, kUnbound);
      if (bind_head(program_.clauses[ci].head, a, scratch_)) return true;
    }
    return false;
  }

  bool atom_ground(const CompiledAtom& a) const {
    return std::all_of(a.args.begin(), a.args.end(),
                       [&](Slot s) { return !s.is_var || bindings_[s.value] != kUnbound; });
  }

  void join(std::uint64_t done, std::uint64_t missing, std::size_t n_missing) {
    const std::size_t n = clause_->body.size();
    if (std::popcount(done) == static_cast<int>(n)) {
      finish(missing);
      return;
    }
    // Most selective remaining atom first: ground atoms, then the smallest
    // index bucket under the current bindings.
    std::size_t best = n;
    std::size_t best_size = kUnbounded;
    std::span<const AtomId> best_candidates;
    std::uint32_t best_mask = 0;
    std::vector<ConstantId> args;
    for (std::size_t i = 0; i < n; ++i) {
      if (done & (std::uint64_t{1} << i)) continue;
      const CompiledAtom& a = clause_->body[i];
      std::uint32_t mask = 0;
      args.assign(a.args.size(), ConstantId{0});
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        const Slot s = a.args[k];
        const std::uint32_t v = s.is_var ? bindings_[s.value] : s.value;
        if (v != kUnbound) {
          mask |= 1u << k;
          args[k] = ConstantId{v};
        }
      }
      const bool ground = a.args.size() < 32 && mask == (1u << a.args.size()) - 1;
      const std::span<const AtomId> cands = ground ? std::span<const AtomId>{} : store_.probe(a.predicate, mask, args);
      const std::size_t size = ground ? 0 : cands.size();
      if (size < best_size) {
        best = i;
        best_size = size;
        best_candidates = cands;
        best_mask = mask;
        if (ground) break;
      }
    }
    const CompiledAtom& a = clause_->body[best];
    const std::uint64_t bit = std::uint64_t{1} << best;
    const bool ground = a.args.size() < 32 && best_mask == (1u << a.args.size()) - 1;

    if (ground) {
      GroundAtom g = instantiate(a, bindings_);
      if (store_.contains(g)) {
        join(done | bit, missing, n_missing);
      } else if (n_missing < width_) {
        if (params_.uncertain || derivable_shape(g)) join(done | bit, missing | bit, n_missing + 1);
      } else {
        ++stats_.rejected_by_width;
      }
      return;
    }

    // Known branch: bind the atom against every matching fact.
    std::vector<std::uint32_t> newly;
    for (AtomId id : best_candidates) {
      const GroundAtom& f = store_.fact(id);
      if (f.args.size() != a.args.size()) continue;
      newly.clear();
      bool ok = true;
      for (std::size_t k = 0; ok && k < a.args.size(); ++k) {
        const Slot s = a.args[k];
        const std::uint32_t c = raw(f.args[k]);
        if (!s.is_var) {
          ok = s.value == c;
        } else if (bindings_[s.value] == kUnbound) {
          bindings_[s.value] = c;
          newly.push_back(s.value);
        } else {
          ok = bindings_[s.value] == c;
        }
      }
      if (ok) join(done | bit, missing, n_missing);
      for (std::uint32_t v : newly) bindings_[v] = kUnbound;
    }
    // Missing branch: the atom stays unmatched and is bound later.
    if (n_missing < width_) join(done | bit, missing | bit, n_missing + 1);
  }

  // All atoms decided. Assign any variables that only occur in missing atoms,
  // then keep the assignment if every missing atom really is missing.
  void finish(std::uint64_t missing) {
    std::vector<std::uint32_t> residual;
    for (std::uint32_t v = 0; v < bindings_.size(); ++v) {
      if (bindings_[v] == kUnbound) residual.push_back(v);
    }
    if (residual.empty()) {
      emit(missing);
      return;
    }
    std::uint64_t cap = kInfinite;
    if (params_.uncertain && params_.enumeration_cap) cap = *params_.enumeration_cap;
    const std::size_t d = domain_.size();
    if (d == 0) return;
    std::vector<std::size_t> odometer(residual.size(), 0);
    std::uint64_t tried = 0;
    while (true) {
      if (tried == cap) {
        ++stats_.truncated_enumerations;
        std::uint64_t total = 1;
        bool overflow = false;
        for (std::size_t i = 0; i < residual.size(); ++i) overflow |= __builtin_mul_overflow(total, d, &total);
        stats_.truncated_assignments += overflow ? kInfinite - cap : total - cap;
        break;
      }
      for (std::size_t i = 0; i < residual.size(); ++i) bindings_[residual[i]] = raw(domain_[odometer[i]]);
      emit(missing);
      ++tried;
      std::size_t i = 0;
      while (i < odometer.size() && ++odometer[i] == d) odometer[i++] = 0;
      if (i == odometer.size()) break;
    }
    for (std::uint32_t v : residual) bindings_[v] = kUnbound;
  }

  void emit(std::uint64_t missing) {
    Candidate c;
    for (std::size_t i = 0; i < clause_->body.size(); ++i) {
      if (!(missing & (std::uint64_t{1} << i))) continue;
      GroundAtom g = instantiate(clause_->body[i], bindings_);
      if (store_.contains(g)) return;  // produced by the known branch instead
      if (!params_.uncertain && !derivable_shape(g)) return;
      c.missing.push_back(std::move(g));
    }
    c.clause = clause_index_;
    c.bindings = bindings_;
    out_->push_back(std::move(c));
  }

  const Program& program_;
  const FactStore& store_;
  std::span<const ConstantId> domain_;
  const GrounderParams& params_;
  GroundingStats& stats_;

  const CompiledClause* clause_ = nullptr;
  std::uint32_t clause_index_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint32_t> bindings_;
  mutable std::vector<std::uint32_t> scratch_;
  std::vector<Candidate>* out_ = nullptr;
};

struct WorkerOutput {
  std::vector<InstanceKey> instances;
  std::vector<GroundAtom> proved;
  GroundingStats stats;
};

// Grounds a contiguous slice of roots. Each root gets its own goal graph, so
// the output does not depend on how roots are split across workers.
class Worker {
 public:
  Worker(const Program& program, const FactStore& store, std::span<const ConstantId> domain,
         const GrounderParams& params, std::size_t width)
      : program_(program),
        params_(params),
        width_(width),
        depth_(params.depth == kUnbounded ? kInfinite : params.depth),
        expander_(program, store, domain, params, out_.stats) {}

  WorkerOutput run(std::span<const GroundAtom> roots) {
    for (const GroundAtom& r : roots) {
      ++out_.stats.roots;
      if (depth_ == 1) {
        ground_shallow(r);
      } else {
        ground_deep(r);
      }
    }
    return std::move(out_);
  }

 private:
  struct Node {
    GroundAtom atom;
    std::uint64_t budget = 0;
    const std::vector<Candidate>* candidates = nullptr;
    std::vector<std::vector<std::uint32_t>> children;  // per candidate, per missing atom
    std::uint64_t min_depth = kInfinite;
    std::uint64_t accepted_budget = 0;
  };

  static bool proved_within(const Node& n, std::uint64_t budget) {
    return n.min_depth != kInfinite && n.min_depth <= budget;
  }

  void record(const Candidate& c) { out_.instances.push_back({c.clause, c.bindings}); }

  void ground_shallow(const GroundAtom& root) {
    scratch_.clear();
    expander_.expand(root, params_.uncertain ? width_ : 0, scratch_);
    for (const Candidate& c : scratch_) record(c);
    if (!scratch_.empty()) out_.proved.push_back(root);
  }

  const std::vector<Candidate>& candidates(const GroundAtom& atom, std::size_t width) {
    auto& cache = width == 0 ? cache_narrow_ : cache_wide_;
    auto it = cache.find(atom);
    if (it != cache.end()) {
      ++out_.stats.nodes_expanded;
      return it->second;
    }
    if (cache.size() > kCacheLimit) cache.clear();
    std::vector<Candidate> cands;
    expander_.expand(atom, width, cands);
    return cache.emplace(atom, std::move(cands)).first->second;
  }

  std::uint32_t intern(const GroundAtom& atom, std::uint64_t budget) {
    auto [it, inserted] = index_.try_emplace(atom, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) {
      nodes_.push_back(Node{atom, budget, nullptr, {}, kInfinite, 0});
    }
    return it->second;
  }

  void ground_deep(const GroundAtom& root) {
    nodes_.clear();
    index_.clear();
    intern(root, depth_);
    // Breadth-first, so each goal is first reached with its largest budget.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const std::uint64_t budget = nodes_[i].budget;
      const std::size_t width = (!params_.uncertain && budget == 1) ? 0 : width_;
      const std::vector<Candidate>& cands = candidates(nodes_[i].atom, width);
      std::vector<std::vector<std::uint32_t>> children(cands.size());
      if (budget > 1) {
        for (std::size_t k = 0; k < cands.size(); ++k) {
          for (const GroundAtom& m : cands[k].missing) {
            children[k].push_back(intern(m, budget_minus_one(budget)));
          }
        }
      }
      nodes_[i].candidates = &cands;
      nodes_[i].children = std::move(children);
    }
    if (params_.uncertain) {
      accept_uncertain();
      if (!nodes_[0].candidates->empty()) out_.proved.push_back(root);
    } else {
      compute_min_depths();
      accept_certain();
      if (proved_within(nodes_[0], depth_)) out_.proved.push_back(root);
    }
  }

  // Horn-style propagation: a candidate fires once all its missing atoms are
  // proved; goals are settled in order of increasing proof depth.
  void compute_min_depths() {
    struct Edge {
      std::uint32_t parent;
      std::uint32_t candidate;
    };
    std::vector<std::vector<Edge>> users(nodes_.size());
    std::vector<std::vector<std::uint32_t>> pending(nodes_.size());
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t n = 0; n < nodes_.size(); ++n) {
      const Node& node = nodes_[n];
      pending[n].resize(node.candidates->size());
      for (std::uint32_t k = 0; k < node.candidates->size(); ++k) {
        const std::size_t missing = (*node.candidates)[k].missing.size();
        if (missing == 0) {
          if (nodes_[n].min_depth == kInfinite) {
            nodes_[n].min_depth = 1;
            frontier.push_back(n);
          }
        } else if (node.children[k].size() == missing) {
          pending[n][k] = static_cast<std::uint32_t>(missing);
          for (std::uint32_t c : node.children[k]) users[c].push_back({n, k});
        } else {
          pending[n][k] = kUnbound;  // missing atoms were not expanded
        }
      }
    }
    for (std::uint64_t level = 1; !frontier.empty() && level < depth_; ++level) {
      std::vector<std::uint32_t> next;
      for (std::uint32_t c : frontier) {
        for (const Edge& e : users[c]) {
          std::uint32_t& p = pending[e.parent][e.candidate];
          if (p == kUnbound || p == 0) continue;
          if (--p == 0 && nodes_[e.parent].min_depth == kInfinite) {
            nodes_[e.parent].min_depth = level + 1;
            next.push_back(e.parent);
          }
        }
      }
      frontier = std::move(next);
    }
  }

  void accept_certain() {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> stack{{0, depth_}};
    while (!stack.empty()) {
      auto [n, budget] = stack.back();
      stack.pop_back();
      if (nodes_[n].accepted_budget >= budget) continue;
      nodes_[n].accepted_budget = budget;
      const std::uint64_t rest = budget_minus_one(budget);
      const auto& cands = *nodes_[n].candidates;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        const auto& children = nodes_[n].children[k];
        bool ok = children.size() == cands[k].missing.size();
        for (std::uint32_t c : children) ok = ok && proved_within(nodes_[c], rest);
        if (!ok) {
          ++out_.stats.rejected_by_depth;
          continue;
        }
        record(cands[k]);
        for (std::uint32_t c : children) stack.emplace_back(c, rest);
      }
    }
  }

  void accept_uncertain() {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> stack{{0, depth_}};
    while (!stack.empty()) {
      auto [n, budget] = stack.back();
      stack.pop_back();
      if (nodes_[n].accepted_budget >= budget) continue;
      nodes_[n].accepted_budget = budget;
      const auto& cands = *nodes_[n].candidates;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        record(cands[k]);
        for (std::uint32_t c : nodes_[n].children[k]) stack.emplace_back(c, budget_minus_one(budget));
      }
    }
  }

  static constexpr std::size_t kCacheLimit = 1'000'000;

  const Program& program_;
  const GrounderParams& params_;
  std::size_t width_;
  std::uint64_t depth_;
  WorkerOutput out_;
  Expander expander_;
  std::vector<Candidate> scratch_;
  std::vector<Node> nodes_;
  std::unordered_map<GroundAtom, std::uint32_t, GroundAtomHash> index_;
  std::unordered_map<GroundAtom, std::vector<Candidate>, GroundAtomHash> cache_wide_;
  std::unordered_map<GroundAtom, std::vector<Candidate>, GroundAtomHash> cache_narrow_;
};

std::string bound_label(std::size_t v) { return v == kUnbounded ? "inf" : std::to_string(v); }

}  // namespace

void GrounderParams::validate() const {
  if (depth == 0) throw Error("grounder depth must be at least 1");
  if (jobs == 0) throw Error("jobs must be at least 1");
}

std::string GrounderParams::label() const {
  return std::string(uncertain ? "BC^u_{" : "BC_{") + bound_label(width) + "," + bound_label(depth) + "}";
}

std::size_t GroundRuleInstance::unknown_count() const {
  return static_cast<std::size_t>(std::count(known.begin(), known.end(), false));
}

Substitution GroundRuleInstance::substitution(const HornClause& clause) const {
  Substitution theta;
  const std::vector<VariableId> vars = clause.variables();
  for (std::size_t i = 0; i < vars.size() && i < bindings.size(); ++i) theta.bind(vars[i], bindings[i]);
  return theta;
}

std::size_t ProofTree::depth() const {
  std::size_t d = 0;
  for (const ProofTree& c : children) d = std::max(d, c.depth());
  return d + 1;
}

std::vector<GroundAtom> herbrand_base(const Theory& theory) {
  std::vector<GroundAtom> out;
  const std::size_t n = theory.symbols.constant_count();
  for (std::uint32_t p = 0; p < theory.symbols.predicate_count(); ++p) {
    const std::size_t arity = theory.symbols.arity(PredicateId{p});
    if (arity > 0 && n == 0) continue;
    std::vector<std::size_t> odo(arity, 0);
    while (true) {
      GroundAtom g{PredicateId{p}, {}};
      for (std::size_t i = 0; i < arity; ++i) g.args.push_back(ConstantId{static_cast<std::uint32_t>(odo[i])});
      out.push_back(std::move(g));
      std::size_t i = arity;
      while (i > 0 && ++odo[i - 1] == n) odo[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

GroundingResult ground(const Theory& theory, const FactStore& store, const GrounderParams& params,
                       std::span<const GroundAtom> roots) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  const Program program = compile(theory);
  std::vector<ConstantId> domain(theory.symbols.constant_count());
  for (std::size_t i = 0; i < domain.size(); ++i) domain[i] = ConstantId{static_cast<std::uint32_t>(i)};

  GroundingResult result;
  result.params = params;
  result.effective_width = std::min(params.width, theory.max_body_length());

  std::vector<GroundAtom> unique_roots;
  {
    std::unordered_map<GroundAtom, bool, GroundAtomHash> seen;
    for (const GroundAtom& r : roots) {
      if (seen.try_emplace(r, true).second) unique_roots.push_back(r);
    }
  }

  const std::size_t jobs = std::max<std::size_t>(1, std::min(params.jobs, unique_roots.size()));
  std::vector<WorkerOutput> outputs(jobs);
  auto run_slice = [&](std::size_t j) {
    const std::size_t lo = unique_roots.size() * j / jobs;
    const std::size_t hi = unique_roots.size() * (j + 1) / jobs;
    Worker w(program, store, domain, params, result.effective_width);
    outputs[j] = w.run(std::span<const GroundAtom>(unique_roots).subspan(lo, hi - lo));
  };
  if (jobs == 1) {
    run_slice(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(run_slice, j);
    for (std::thread& t : threads) t.join();
  }

  std::vector<InstanceKey> keys;
  std::vector<GroundAtom> proved;
  for (WorkerOutput& o : outputs) {
    keys.insert(keys.end(), std::make_move_iterator(o.instances.begin()),
                std::make_move_iterator(o.instances.end()));
    proved.insert(proved.end(), o.proved.begin(), o.proved.end());
    GroundingStats& s = result.stats;
    s.roots += o.stats.roots;
    s.nodes_expanded += o.stats.nodes_expanded;
    s.rejected_by_width += o.stats.rejected_by_width;
    s.rejected_by_depth += o.stats.rejected_by_depth;
    s.truncated_enumerations += o.stats.truncated_enumerations;
    s.truncated_assignments += o.stats.truncated_assignments;
    o = WorkerOutput{};
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  result.instances.reserve(keys.size());
  for (const InstanceKey& k : keys) {
    const CompiledClause& c = program.clauses[k.clause];
    GroundRuleInstance inst;
    inst.rule_id = c.rule_id;
    inst.bindings.reserve(k.bindings.size());
    for (std::uint32_t b : k.bindings) inst.bindings.push_back(ConstantId{b});
    inst.head = result.atoms.intern(instantiate(c.head, k.bindings));
    for (const CompiledAtom& a : c.body) {
      GroundAtom g = instantiate(a, k.bindings);
      inst.known.push_back(store.contains(g));
      inst.body.push_back(result.atoms.intern(g));
    }
    result.instances.push_back(std::move(inst));
  }
  keys.clear();
  keys.shrink_to_fit();

  std::unordered_map<std::uint32_t, std::size_t> head_counts;
  for (const GroundRuleInstance& inst : result.instances) ++head_counts[raw(inst.head)];
  for (const GroundAtom& r : unique_roots) {
    const AtomId id = result.atoms.intern(r);
    result.roots.push_back(id);
    auto it = head_counts.find(raw(id));
    result.proof_counts.push_back(it == head_counts.end() ? 0 : it->second);
  }
  for (const GroundAtom& p : proved) result.proved.push_back(*result.atoms.find(p));
  std::sort(result.proved.begin(), result.proved.end());

  result.stats.instances = result.instances.size();
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

GroundingResult full_grounding(const Theory& theory, const FactStore& store, std::uint64_t max_instances,
                               std::size_t jobs) {
  const std::uint64_t n = theory.symbols.constant_count();
  std::uint64_t hu = 0;
  try {
    hu = herbrand_universe_size(theory, n);
  } catch (const OverflowError&) {
    throw BudgetError("full grounding refused: the Herbrand universe exceeds 2^64 ground rules",
                      std::numeric_limits<double>::infinity(), static_cast<double>(max_instances));
  }
  if (hu > max_instances) {
    throw BudgetError("full grounding refused: " + std::to_string(hu) + " ground rules over " +
                          std::to_string(n) + " constants exceed the budget of " +
                          std::to_string(max_instances),
                      static_cast<double>(hu), static_cast<double>(max_instances));
  }
  GrounderParams params;
  params.width = kUnbounded;
  params.depth = 1;
  params.uncertain = true;
  params.jobs = jobs;
  const std::vector<GroundAtom> hb = herbrand_base(theory);
  return ground(theory, store, params, hb);
}

std::vector<GroundAtom> provable_set(const GroundingResult& result) {
  std::vector<GroundAtom> out;
  out.reserve(result.proved.size());
  for (AtomId id : result.proved) out.push_back(result.atoms[id]);
  return out;
}

std::optional<ProofTree> proof_tree(const GroundingResult& result, AtomId root) {
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> by_head;
  for (std::size_t i = 0; i < result.instances.size(); ++i) by_head[raw(result.instances[i].head)].push_back(i);
  if (!by_head.count(raw(root))) return std::nullopt;

  if (result.params.uncertain) {
    // Expand derivable missing atoms while depth remains, never revisiting a
    // goal on the current path.
    std::vector<std::uint32_t> path;
    auto build = [&](auto& self, AtomId goal, std::uint64_t budget) -> ProofTree {
      const std::size_t inst = by_head[raw(goal)].front();
      ProofTree t{goal, inst, {}};
      path.push_back(raw(goal));
      if (budget > 1) {
        const GroundRuleInstance& g = result.instances[inst];
        for (std::size_t k = 0; k < g.body.size(); ++k) {
          const AtomId b = g.body[k];
          if (g.known[k] || !by_head.count(raw(b))) continue;
          if (std::find(path.begin(), path.end(), raw(b)) != path.end()) continue;
          t.children.push_back(self(self, b, budget_minus_one(budget)));
        }
      }
      path.pop_back();
      return t;
    };
    const std::uint64_t depth = result.params.depth == kUnbounded ? kInfinite : result.params.depth;
    return build(build, root, depth);
  }

  // Minimum proof depth of every derivable atom, by repeated relaxation.
  std::unordered_map<std::uint32_t, std::uint64_t> best;
  auto instance_depth = [&](const GroundRuleInstance& g) -> std::optional<std::uint64_t> {
    std::uint64_t d = 1;
    for (std::size_t k = 0; k < g.body.size(); ++k) {
      if (g.known[k]) continue;
      auto it = best.find(raw(g.body[k]));
      if (it == best.end()) return std::nullopt;
      d = std::max(d, it->second + 1);
    }
    return d;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const GroundRuleInstance& g : result.instances) {
      const auto d = instance_depth(g);
      if (!d) continue;
      auto [it, inserted] = best.try_emplace(raw(g.head), *d);
      if (inserted || *d < it->second) {
        it->second = *d;
        changed = true;
      }
    }
  }
  if (!best.count(raw(root))) return std::nullopt;

  auto build = [&](auto& self, AtomId goal) -> ProofTree {
    const std::uint64_t target = best.at(raw(goal));
    for (std::size_t i : by_head[raw(goal)]) {
      const GroundRuleInstance& g = result.instances[i];
      const auto d = instance_depth(g);
      if (!d || *d != target) continue;
      ProofTree t{goal, i, {}};
      for (std::size_t k = 0; k < g.body.size(); ++k) {
        if (!g.known[k]) t.children.push_back(self(self, g.body[k]));
      }
      return t;
    }
    throw Error("inconsistent proof depths");
  };
  return build(build, root);
}

}  // namespace bcg
