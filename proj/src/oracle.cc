#include "bcg/oracle.h"

#include <algorithm>
#include <limits>

#include "bcg/errors.h"

namespace bcg {
namespace {

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

std::uint64_t as_budget(std::size_t d) { return d == kUnbounded ? kInf : d; }

OracleInstance make_instance(const HornClause& c, const std::vector<VariableId>& vars,
                             const std::vector<ConstantId>& values, const std::set<GroundAtom>& facts) {
  Substitution theta;
  for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], values[i]);
  OracleInstance inst;
  inst.rule_id = c.rule_id;
  inst.bindings = values;
  inst.head = to_ground(apply_substitution(c.head, theta));
  for (const Atom& b : c.body) {
    inst.body.push_back(to_ground(apply_substitution(b, theta)));
    inst.known.push_back(facts.count(inst.body.back()) > 0);
  }
  return inst;
}

// Assigns every variable not fixed in `fixed` over all constants.
void odometer(const HornClause& c, const std::vector<VariableId>& vars, std::vector<ConstantId> values,
              const std::vector<bool>& fixed, std::size_t n_constants, const std::set<GroundAtom>& facts,
              const std::function<void(const OracleInstance&)>& fn) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!fixed[i]) free.push_back(i);
  }
  if (!free.empty() && n_constants == 0) return;
  for (std::size_t i : free) values[i] = ConstantId{0};
  while (true) {
    fn(make_instance(c, vars, values, facts));
    std::size_t k = 0;
    for (; k < free.size(); ++k) {
      const std::uint32_t next = raw(values[free[k]]) + 1;
      if (next < n_constants) {
        values[free[k]] = ConstantId{next};
        break;
      }
      values[free[k]] = ConstantId{0};
    }
    if (k == free.size()) break;
  }
}

std::size_t unknown_count(const OracleInstance& inst) {
  return static_cast<std::size_t>(std::count(inst.known.begin(), inst.known.end(), false));
}

class Oracle {
 public:
  Oracle(const Theory& theory, const std::set<GroundAtom>& facts, const GrounderParams& params)
      : theory_(theory), facts_(facts), params_(params) {
    params.validate();
    width_ = std::min(params.width, theory.max_body_length());
    if (!params.uncertain && params.depth == kUnbounded) compute_levels();
  }

  // Instances of any clause whose head is `goal`.
  const std::vector<OracleInstance>& instances_for(const GroundAtom& goal) {
    auto it = by_head_.find(goal);
    if (it != by_head_.end()) return it->second;
    std::vector<OracleInstance> out;
    for (const HornClause& c : theory_.clauses) {
      const std::optional<Substitution> theta = match_head(to_atom(goal), c.head);
      if (!theta) continue;
      const std::vector<VariableId> vars = c.variables();
      std::vector<ConstantId> values(vars.size(), ConstantId{0});
      std::vector<bool> fixed(vars.size(), false);
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (auto v = theta->find(vars[i])) {
          values[i] = *v;
          fixed[i] = true;
        }
      }
      odometer(c, vars, values, fixed, theory_.symbols.constant_count(), facts_,
               [&](const OracleInstance& inst) { out.push_back(inst); });
    }
    return by_head_.emplace(goal, std::move(out)).first->second;
  }

  // prov(a, D): some instance with head a, within width, whose unknown atoms
  // are all provable within D - 1.
  bool provable(const GroundAtom& a, std::uint64_t d) {
    if (d == 0) return false;
    if (d == kInf) return levels_.count(a) > 0;
    const auto key = std::make_pair(a, d);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool result = false;
    for (const OracleInstance& inst : instances_for(a)) {
      if (acceptable(inst, d)) {
        result = true;
        break;
      }
    }
    memo_[key] = result;
    return result;
  }

  bool acceptable(const OracleInstance& inst, std::uint64_t d) {
    const std::size_t unknown = unknown_count(inst);
    if (unknown > width_) return false;
    for (std::size_t k = 0; k < inst.body.size(); ++k) {
      if (!inst.known[k] && !provable(inst.body[k], d == kInf ? kInf : d - 1)) return false;
    }
    return true;
  }

  OracleResult ground(std::span<const GroundAtom> roots) {
    OracleResult result;
    std::map<std::pair<std::size_t, std::vector<ConstantId>>, OracleInstance> accepted;
    std::map<GroundAtom, std::uint64_t> visited;
    std::vector<std::pair<GroundAtom, std::uint64_t>> stack;
    const std::uint64_t depth = as_budget(params_.depth);
    for (const GroundAtom& r : roots) {
      if (params_.uncertain) {
        if (std::any_of(instances_for(r).begin(), instances_for(r).end(),
                        [&](const OracleInstance& i) { return unknown_count(i) <= width_; })) {
          result.proved.insert(r);
        }
      } else if (provable(r, depth)) {
        result.proved.insert(r);
      }
      stack.emplace_back(r, depth);
    }
    while (!stack.empty()) {
      auto [a, d] = stack.back();
      stack.pop_back();
      auto [vit, inserted] = visited.try_emplace(a, d);
      if (!inserted) {
        if (vit->second >= d) continue;
        vit->second = d;
      }
      const std::uint64_t rest = d == kInf ? kInf : d - 1;
      for (const OracleInstance& inst : instances_for(a)) {
        const bool ok = params_.uncertain ? unknown_count(inst) <= width_ : acceptable(inst, d);
        if (!ok) continue;
        accepted.try_emplace({inst.rule_id, inst.bindings}, inst);
        if (rest == 0) continue;
        for (std::size_t k = 0; k < inst.body.size(); ++k) {
          if (!inst.known[k]) stack.emplace_back(inst.body[k], rest);
        }
      }
    }
    for (auto& [key, inst] : accepted) result.instances.push_back(std::move(inst));
    return result;
  }

 private:
  // Least fixpoint of provability with unlimited depth, by naive iteration
  // over the whole instance space.
  void compute_levels() {
    bool changed = true;
    while (changed) {
      changed = false;
      for_each_hu_instance(theory_, facts_, [&](const OracleInstance& inst) {
        if (levels_.count(inst.head) || unknown_count(inst) > width_) return;
        for (std::size_t k = 0; k < inst.body.size(); ++k) {
          if (!inst.known[k] && !levels_.count(inst.body[k])) return;
        }
        levels_.insert(inst.head);
        changed = true;
      });
    }
  }

  const Theory& theory_;
  const std::set<GroundAtom>& facts_;
  GrounderParams params_;
  std::size_t width_ = 0;
  std::set<GroundAtom> levels_;
  std::map<GroundAtom, std::vector<OracleInstance>> by_head_;
  std::map<std::pair<GroundAtom, std::uint64_t>, bool> memo_;
};

}  // namespace

void for_each_hu_instance(const Theory& theory, const std::set<GroundAtom>& facts,
                          const std::function<void(const OracleInstance&)>& fn) {
  for (const HornClause& c : theory.clauses) {
    const std::vector<VariableId> vars = c.variables();
    odometer(c, vars, std::vector<ConstantId>(vars.size(), ConstantId{0}), std::vector<bool>(vars.size(), false),
             theory.symbols.constant_count(), facts, fn);
  }
}

std::vector<OracleInstance> enumerate_hu(const Theory& theory, const std::set<GroundAtom>& facts,
                                         std::uint64_t max_instances) {
  const std::uint64_t n = herbrand_universe_size(theory, theory.symbols.constant_count());
  if (n > max_instances) {
    throw BudgetError("Herbrand universe of " + std::to_string(n) + " ground rules exceeds the budget of " +
                          std::to_string(max_instances),
                      static_cast<double>(n), static_cast<double>(max_instances));
  }
  std::vector<OracleInstance> out;
  for_each_hu_instance(theory, facts, [&](const OracleInstance& inst) { out.push_back(inst); });
  return out;
}

std::set<GroundAtom> forward_closure(const Theory& theory, const std::set<GroundAtom>& facts) {
  std::set<GroundAtom> closure = facts;
  bool changed = true;
  while (changed) {
    changed = false;
    for_each_hu_instance(theory, facts, [&](const OracleInstance& inst) {
      if (closure.count(inst.head)) return;
      for (const GroundAtom& b : inst.body) {
        if (!closure.count(b)) return;
      }
      closure.insert(inst.head);
      changed = true;
    });
  }
  for (const GroundAtom& f : facts) closure.erase(f);
  return closure;
}

std::set<GroundAtom> oracle_provable(const Theory& theory, const std::set<GroundAtom>& facts,
                                     const GrounderParams& params, std::span<const GroundAtom> roots) {
  if (params.uncertain) return oracle_ground(theory, facts, params, roots).proved;
  Oracle oracle(theory, facts, params);
  std::set<GroundAtom> out;
  for (const GroundAtom& r : roots) {
    if (oracle.provable(r, as_budget(params.depth))) out.insert(r);
  }
  return out;
}

OracleResult oracle_ground(const Theory& theory, const std::set<GroundAtom>& facts,
                           const GrounderParams& params, std::span<const GroundAtom> roots) {
  Oracle oracle(theory, facts, params);
  return oracle.ground(roots);
}

}  // namespace bcg
