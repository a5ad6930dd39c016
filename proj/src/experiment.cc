#include "bcg/experiment.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "bcg/errors.h"
#include "bcg/parser.h"
#include "json.hpp"

namespace bcg {

Dataset load_dataset(const std::string& rules, const std::string& train, const std::string& valid,
                     const std::string& test) {
  Dataset d;
  if (!rules.empty()) {
    std::ifstream in(rules);
    if (!in) throw Error("cannot open rule file '" + rules + "'");
    std::stringstream text;
    text << in.rdbuf();
    try {
      parse_theory_into(text.str(), d.theory);
    } catch (const ParseError& e) {
      throw ParseError(rules + ": " + e.message(), e.line(), e.column());
    }
  }
  if (!train.empty()) d.train = read_triples_file(train, d.theory);
  if (!valid.empty()) d.valid = read_triples_file(valid, d.theory);
  if (!test.empty()) d.test = read_triples_file(test, d.theory);
  return d;
}

std::optional<double> initial_score(const EmbeddingModel& model, const GroundAtom& atom) {
  if (atom.args.size() != 2) return std::nullopt;
  const std::uint32_t s = raw(atom.args[0]), r = raw(atom.predicate), o = raw(atom.args[1]);
  if (!model.entity_trained(s) || !model.entity_trained(o) || !model.relation_trained(r)) return std::nullopt;
  return model.probability(s, r, o);
}

std::vector<std::uint32_t> vocabulary(const EmbeddingModel& model) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t e = 0; e < model.entity_count(); ++e) {
    if (model.entity_trained(e)) out.push_back(e);
  }
  return out;
}

std::vector<GroundAtom> ranking_roots(const Dataset& data, std::span<const std::uint32_t> entities,
                                      const std::set<Triple>& filter, const EvalOptions& options) {
  std::vector<GroundAtom> roots;
  std::unordered_set<GroundAtom, GroundAtomHash> seen;
  auto add = [&](const Triple& t) {
    GroundAtom g{PredicateId{t.relation}, {ConstantId{t.subject}, ConstantId{t.object}}};
    if (seen.insert(g).second) roots.push_back(std::move(g));
  };
  const std::vector<Triple> test = to_triples(data.test);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Triple& t = test[i];
    if (!std::binary_search(entities.begin(), entities.end(), t.subject) ||
        !std::binary_search(entities.begin(), entities.end(), t.object)) {
      continue;
    }
    add(t);
    if (options.side != Side::tail) {
      for (const Triple& c : corruptions(t, true, entities, filter, options, i)) add(c);
    }
    if (options.side != Side::head) {
      for (const Triple& c : corruptions(t, false, entities, filter, options, i)) add(c);
    }
  }
  return roots;
}

namespace {

std::set<Triple> filter_set(const Dataset& data) {
  std::set<Triple> out;
  for (const auto* part : {&data.train, &data.valid, &data.test}) {
    for (const Triple& t : to_triples(*part)) out.insert(t);
  }
  return out;
}

}  // namespace

ExperimentSummary run_experiment(const Dataset& data, const ExperimentConfig& config, std::ostream* log) {
  if (config.seeds.empty()) throw Error("at least one seed is required");
  if (data.test.empty()) throw Error("the experiment needs test facts");
  const FactStore store(data.train);
  const std::vector<Triple> train_triples = to_triples(data.train);
  const std::vector<Triple> test = to_triples(data.test);
  const std::set<Triple> filter = filter_set(data);

  ExperimentSummary summary;
  for (std::uint64_t seed : config.seeds) {
    SeedResult run;
    run.seed = seed;
    TrainConfig kc = config.kge;
    kc.seed = seed;
    EmbeddingModel model(kc.kind, data.theory.symbols.constant_count(), data.theory.symbols.predicate_count(), kc.dim);
    model.initialize(seed);
    run.losses = train(model, train_triples, kc).epoch_losses;
    if (log) *log << "seed " << seed << ": trained, final loss " << run.losses.back() << "\n";

    const std::vector<std::uint32_t> entities = vocabulary(model);
    EvalOptions eo = config.eval;
    eo.seed = seed;
    auto o0 = [&](const Triple& t) {
      const GroundAtom g{PredicateId{t.relation}, {ConstantId{t.subject}, ConstantId{t.object}}};
      return initial_score(model, g).value_or(kUnseenAtomScore);
    };
    run.baseline = evaluate(o0, test, entities, filter, eo);
    if (log) *log << "seed " << seed << ": baseline MRR " << run.baseline.mrr << "\n";

    const std::vector<GroundAtom> roots = ranking_roots(data, entities, filter, eo);
    for (std::size_t depth : config.depths) {
      DepthResult dr;
      dr.depth = depth;
      if (depth == 0) {
        dr.report = run.baseline;
        run.depths.push_back(std::move(dr));
        continue;
      }
      GrounderParams gp = config.grounder;
      gp.depth = depth;
      const GroundingResult grounding = ground(data.theory, store, gp, roots);
      if (grounding.instances.size() > config.max_instances) {
        throw BudgetError("grounding produced " + std::to_string(grounding.instances.size()) +
                              " rule instances, above the budget of " + std::to_string(config.max_instances),
                          static_cast<double>(grounding.instances.size()), static_cast<double>(config.max_instances));
      }
      const GroundedNetwork net = build_gmn(grounding, store, data.theory.symbols);
      PropagationOptions po;
      po.tnorm = config.tnorm;
      po.jobs = gp.jobs;
      if (!config.fixpoint) po.steps = config.steps.value_or(depth);
      const ScoreTable init =
          initial_scores(net, [&](const GroundAtom& a) { return initial_score(model, a); });
      const PropagationResult prop = propagate(net, init, po);
      auto scorer = [&](const Triple& t) {
        const GroundAtom g{PredicateId{t.relation}, {ConstantId{t.subject}, ConstantId{t.object}}};
        if (auto id = grounding.atoms.find(g)) return prop.scores.scores[raw(*id)];
        return o0(t);
      };
      dr.report = evaluate(scorer, test, entities, filter, eo);
      dr.network = gmn_stats(net);
      dr.grounding = grounding.stats;
      if (log) {
        *log << "seed " << seed << ": " << gp.label() << " " << dr.network.nodes << " nodes, " << dr.network.edges
             << " edges, MRR " << dr.report.mrr << "\n";
      }
      run.depths.push_back(std::move(dr));
    }
    summary.runs.push_back(std::move(run));
  }

  std::vector<RankingReport> base;
  for (const SeedResult& r : summary.runs) base.push_back(r.baseline);
  summary.baseline = average_reports(base);
  for (std::size_t i = 0; i < config.depths.size(); ++i) {
    std::vector<RankingReport> per;
    for (const SeedResult& r : summary.runs) per.push_back(r.depths[i].report);
    summary.depths.push_back(average_reports(per));
  }
  return summary;
}

std::string summary_json(const ExperimentSummary& summary, const ExperimentConfig& config) {
  using nlohmann::ordered_json;
  auto metrics = [](const RankingReport& r) {
    ordered_json j;
    j["mrr"] = r.mrr;
    j["hits@1"] = r.hits1;
    j["hits@3"] = r.hits3;
    j["hits@10"] = r.hits10;
    j["queries"] = r.queries;
    j["excluded_oov"] = r.excluded_oov;
    return j;
  };
  ordered_json j;
  j["side"] = side_name(config.eval.side);
  j["filtered"] = config.eval.filtered;
  j["tnorm"] = tnorm_name(config.tnorm);
  j["seeds"] = config.seeds;
  j["baseline"] = metrics(summary.baseline);
  j["depths"] = ordered_json::array();
  for (std::size_t i = 0; i < config.depths.size(); ++i) {
    ordered_json d = metrics(summary.depths[i]);
    GrounderParams gp = config.grounder;
    gp.depth = config.depths[i] == 0 ? 1 : config.depths[i];
    d = ordered_json{{"depth", config.depths[i]},
                     {"grounder", config.depths[i] == 0 ? std::string("none") : gp.label()},
                     {"metrics", d}};
    ordered_json per_seed = ordered_json::array();
    for (const SeedResult& r : summary.runs) {
      const DepthResult& dr = r.depths[i];
      per_seed.push_back({{"seed", r.seed},
                          {"mrr", dr.report.mrr},
                          {"nodes", dr.network.nodes},
                          {"edges", dr.network.edges},
                          {"rejected_by_width", dr.grounding.rejected_by_width},
                          {"rejected_by_depth", dr.grounding.rejected_by_depth}});
    }
    d["runs"] = per_seed;
    j["depths"].push_back(d);
  }
  ordered_json losses = ordered_json::array();
  for (const SeedResult& r : summary.runs) losses.push_back({{"seed", r.seed}, {"final_loss", r.losses.back()}});
  j["training"] = losses;
  return j.dump(2);
}

}  // namespace bcg
