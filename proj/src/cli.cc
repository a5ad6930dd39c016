#include "bcg/cli.h"

#include <CLI11.hpp>

#include <charconv>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "bcg/errors.h"
#include "bcg/eval.h"
#include "bcg/experiment.h"
#include "bcg/gmn.h"
#include "bcg/grounder.h"
#include "bcg/kge.h"
#include "bcg/reasoner.h"
#include "json.hpp"

namespace bcg {
namespace {

namespace fs = std::filesystem;

// Invalid option combinations found after CLI11 has parsed the command line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string rules, facts, valid, test, roots = "hb", out = "out";
  std::string gmn, checkpoint, scores;
  std::string width = "0", depth = "1";
  bool uncertain = false;
  std::optional<std::uint64_t> cap;
  std::string tnorm = "product";
  std::optional<std::size_t> steps;
  bool fixpoint = false;
  std::string model = "complex";
  std::size_t dim = 100, epochs = 100, negatives = 32, batch = 512;
  double lr = 1e-2, l2 = 0.0;
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  std::string side = "both";
  bool raw = false;
  std::optional<std::size_t> sample;
  bool ranks = false;
  std::size_t jobs = 1;
  std::uint64_t max_instances = 50'000'000;
  std::vector<std::size_t> depths;
  std::string target;
  std::size_t hops = 1, queries = 24;
  bool withhold_subject = false;
};

std::size_t parse_bound(const std::string& text, const char* what) {
  if (text == "inf") return kUnbounded;
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ConfigError(std::string("--") + what + " must be a non-negative integer or 'inf', got '" + text + "'");
  }
  return v;
}

GrounderParams grounder_params(const RunConfig& c) {
  GrounderParams p;
  p.width = parse_bound(c.width, "width");
  p.depth = parse_bound(c.depth, "depth");
  p.uncertain = c.uncertain;
  p.enumeration_cap = c.cap;
  p.jobs = c.jobs;
  if (p.depth == 0) throw ConfigError("--depth must be at least 1");
  if (p.jobs == 0) throw ConfigError("--jobs must be at least 1");
  return p;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  const auto kind = parse_model_kind(c.model);
  if (!kind) throw ConfigError("unknown --model '" + c.model + "' (expected complex or distmult)");
  t.kind = *kind;
  t.dim = c.dim;
  t.learning_rate = c.lr;
  t.epochs = c.epochs;
  t.negatives = c.negatives;
  t.batch_size = c.batch;
  t.seed = c.seed;
  t.l2 = c.l2;
  try {
    t.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return t;
}

TNormKind tnorm_kind(const RunConfig& c) {
  const auto t = parse_tnorm(c.tnorm);
  if (!t) throw ConfigError("unknown --tnorm '" + c.tnorm + "' (expected product, goedel or lukasiewicz)");
  return *t;
}

EvalOptions eval_options(const RunConfig& c) {
  EvalOptions e;
  const auto side = parse_side(c.side);
  if (!side) throw ConfigError("unknown --side '" + c.side + "' (expected head, tail or both)");
  e.side = *side;
  e.filtered = !c.raw;
  e.sampled_corruptions = c.sample;
  e.seed = c.seed;
  e.jobs = c.jobs;
  return e;
}

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw ConfigError(std::string(command) + " needs " + flag);
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  std::ofstream f(fs::path(c.out) / name, std::ios::binary);
  if (!f) throw Error("cannot write '" + (fs::path(c.out) / name).string() + "'");
  return f;
}

std::string plain_text(const GroundAtom& a, const SymbolTable& symbols) {
  std::string s = symbols.name(a.predicate) + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += symbols.name(a.args[i]);
  }
  return s + ")";
}

void write_triples(std::ostream& out, std::span<const GroundAtom> facts, const SymbolTable& symbols) {
  for (const GroundAtom& f : facts) {
    out << symbols.name(f.args.at(0)) << '\t' << symbols.name(f.predicate) << '\t' << symbols.name(f.args.at(1))
        << '\n';
  }
}

std::vector<std::uint64_t> seed_list(const RunConfig& c) {
  if (c.seeds == 0) throw ConfigError("--seeds must be at least 1");
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < c.seeds; ++i) s.push_back(c.seed + i);
  return s;
}

EmbeddingModel read_checkpoint(const std::string& path, const SymbolTable& symbols) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in, symbols);
}

nlohmann::ordered_json stats_json(const GroundingResult& g, const GmnStats& s) {
  nlohmann::ordered_json j;
  j["grounder"] = g.params.label();
  j["effective_width"] = g.effective_width;
  j["roots"] = g.stats.roots;
  j["proved_roots"] = g.proved.size();
  j["nodes"] = s.nodes;
  j["edges"] = s.edges;
  j["known_nodes"] = s.known_nodes;
  j["root_nodes"] = s.root_nodes;
  j["max_in_degree"] = s.max_in_degree;
  nlohmann::ordered_json per_rule = nlohmann::ordered_json::object();
  for (const auto& [rule, n] : s.edges_per_rule) per_rule[std::to_string(rule)] = n;
  j["edges_per_rule"] = per_rule;
  j["nodes_expanded"] = g.stats.nodes_expanded;
  j["rejected_by_width"] = g.stats.rejected_by_width;
  j["rejected_by_depth"] = g.stats.rejected_by_depth;
  j["truncated_enumerations"] = g.stats.truncated_enumerations;
  j["truncated_assignments"] = g.stats.truncated_assignments;
  return j;
}

struct Grounded {
  Dataset data;
  GroundingResult result;
  GroundedNetwork net;
};

Grounded run_grounding(const RunConfig& c, const char* command) {
  require(c.facts, "--facts", command);
  Grounded g;
  g.data = load_dataset(c.rules, c.facts, "", "");
  const GrounderParams p = grounder_params(c);
  const FactStore store(g.data.train);
  const bool full = c.roots == "hb" && p.uncertain && p.depth == 1 && p.width == kUnbounded;
  if (full) {
    g.result = full_grounding(g.data.theory, store, c.max_instances, p.jobs);
  } else {
    std::vector<GroundAtom> roots;
    if (c.roots == "hb") {
      const SymbolTable& symbols = g.data.theory.symbols;
      std::uint64_t size = 0;
      try {
        size = herbrand_base_size(g.data.theory, symbols.constant_count());
      } catch (const OverflowError&) {
        size = std::numeric_limits<std::uint64_t>::max();
      }
      if (size > c.max_instances) {
        throw BudgetError("the Herbrand base has " + std::to_string(size) + " atoms, above the budget of " +
                              std::to_string(c.max_instances),
                          static_cast<double>(size), static_cast<double>(c.max_instances));
      }
      roots = herbrand_base(g.data.theory);
    } else {
      roots = read_triples_file(c.roots, g.data.theory);
    }
    g.result = ground(g.data.theory, store, p, roots);
  }
  g.net = build_gmn(g.result, store, g.data.theory.symbols);
  return g;
}

void print_stats(const nlohmann::ordered_json& j, std::ostream& out) {
  for (const auto& [key, value] : j.items()) {
    if (key == "edges_per_rule") {
      for (const auto& [rule, n] : value.items()) out << "edges (rule " << rule << ")\t" << n << "\n";
    } else {
      out << key << '\t' << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    }
  }
}

int cmd_ground(const RunConfig& c, std::ostream& out, bool write_network) {
  const Grounded g = run_grounding(c, write_network ? "ground" : "stats");
  const nlohmann::ordered_json j = stats_json(g.result, gmn_stats(g.net));
  if (write_network) {
    export_gmn_file(g.net, (fs::path(c.out) / "network.gmn").string());
    std::ofstream proved = open_output(c, "proved.tsv");
    write_triples(proved, provable_set(g.result), g.data.theory.symbols);
  }
  open_output(c, "stats.json") << j.dump(2) << "\n";
  print_stats(j, out);
  if (g.result.truncated()) out << "warning: enumeration cap reached, the grounding is incomplete\n";
  return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  require(c.facts, "--facts", "train-kge");
  const Dataset data = load_dataset(c.rules, c.facts, "", "");
  const TrainConfig tc = train_config(c);
  EmbeddingModel model(tc.kind, data.theory.symbols.constant_count(), data.theory.symbols.predicate_count(), tc.dim);
  model.initialize(tc.seed);
  const TrainResult r = train(model, to_triples(data.train), tc);
  std::ofstream ckpt = open_output(c, "checkpoint.kge");
  save_checkpoint(model, data.theory.symbols, ckpt);
  std::ofstream losses = open_output(c, "losses.tsv");
  losses.precision(17);
  for (std::size_t i = 0; i < r.epoch_losses.size(); ++i) losses << i + 1 << '\t' << r.epoch_losses[i] << '\n';
  out << "trained " << model_kind_name(tc.kind) << " for " << r.epoch_losses.size() << " epochs, final loss "
      << r.epoch_losses.back() << "\n";
  return kExitOk;
}

int cmd_propagate(const RunConfig& c, std::ostream& out) {
  require(c.gmn, "--gmn", "propagate");
  const GroundedNetwork net = import_gmn_file(c.gmn);
  SymbolTable symbols;
  for (std::size_t i = 0; i < net.predicate_names().size(); ++i) {
    symbols.intern_predicate(net.predicate_names()[i], net.predicate_arities()[i]);
  }
  for (const std::string& name : net.constant_names()) symbols.intern_constant(name);
  std::optional<EmbeddingModel> model;
  if (!c.checkpoint.empty()) model = read_checkpoint(c.checkpoint, symbols);
  const ScoreTable init = initial_scores(net, [&](const GroundAtom& a) -> std::optional<double> {
    if (!model) return std::nullopt;
    return initial_score(*model, a);
  });
  PropagationOptions po;
  po.tnorm = tnorm_kind(c);
  po.jobs = c.jobs;
  if (!c.fixpoint) {
    const std::size_t depth = parse_bound(c.depth, "depth");
    if (c.steps || depth != kUnbounded) po.steps = c.steps.value_or(depth);
  }
  const PropagationResult r = propagate(net, init, po);
  std::ofstream scores = open_output(c, "scores.tsv");
  write_scores(net, r.scores, scores);
  out << "propagated " << net.nodes().size() << " nodes for " << r.steps_run << " steps"
      << (r.converged ? " (converged)" : "") << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  require(c.test, "--test", "eval");
  require(c.checkpoint, "--checkpoint", "eval");
  const Dataset data = load_dataset(c.rules, c.facts, c.valid, c.test);
  const EmbeddingModel model = read_checkpoint(c.checkpoint, data.theory.symbols);
  std::unordered_map<std::string, double> propagated;
  if (!c.scores.empty()) {
    std::ifstream in(c.scores);
    if (!in) throw Error("cannot open score table '" + c.scores + "'");
    for (auto& [atom, score] : read_scores(in)) propagated.emplace(std::move(atom), score);
  }
  const SymbolTable& symbols = data.theory.symbols;
  auto scorer = [&](const Triple& t) {
    const GroundAtom g{PredicateId{t.relation}, {ConstantId{t.subject}, ConstantId{t.object}}};
    if (!propagated.empty()) {
      auto it = propagated.find(plain_text(g, symbols));
      if (it != propagated.end()) return it->second;
    }
    return initial_score(model, g).value_or(kUnseenAtomScore);
  };
  std::set<Triple> filter;
  for (const auto* part : {&data.train, &data.valid, &data.test}) {
    for (const Triple& t : to_triples(*part)) filter.insert(t);
  }
  const std::vector<Triple> test = to_triples(data.test);
  const RankingReport r = evaluate(scorer, test, vocabulary(model), filter, eval_options(c));
  open_output(c, "report.json") << report_json(r) << "\n";
  std::ostringstream table;
  write_report_text(r, table);
  open_output(c, "report.txt") << table.str();
  out << table.str();
  if (c.ranks) {
    std::ofstream ranks = open_output(c, "ranks.tsv");
    for (double x : r.ranks) ranks << x << '\n';
  }
  return kExitOk;
}

int cmd_ablation(const RunConfig& c, std::ostream& out) {
  require(c.rules, "--rules", "make-ablation");
  require(c.facts, "--facts", "make-ablation");
  const Dataset data = load_dataset(c.rules, c.facts, "", "");
  if (data.theory.clauses.empty()) throw ConfigError("make-ablation needs at least one rule");
  PredicateId target = data.theory.clauses.front().head.predicate;
  if (!c.target.empty()) {
    const auto p = data.theory.symbols.find_predicate(c.target);
    if (!p) throw ConfigError("unknown --target predicate '" + c.target + "'");
    target = *p;
  }
  AblationOptions o;
  o.hops = c.hops;
  o.queries = c.queries;
  o.seed = c.seed;
  o.withhold_subject_facts = c.withhold_subject;
  if (o.hops == 0) throw ConfigError("--hops must be at least 1");
  const AblationSplit split = build_ablation_split(data.theory, data.train, target, o);
  const SymbolTable& symbols = data.theory.symbols;
  std::ofstream train = open_output(c, "train.tsv");
  write_triples(train, split.train, symbols);
  std::ofstream test = open_output(c, "test.tsv");
  write_triples(test, split.queries, symbols);
  std::ofstream removed = open_output(c, "removed.tsv");
  write_triples(removed, split.removed, symbols);
  out << "AS_" << o.hops << ": " << split.queries.size() << " queries, " << split.train.size() << " training facts, "
      << split.removed.size() << " withheld\n";
  return kExitOk;
}

int cmd_experiment(const RunConfig& c, std::ostream& out) {
  require(c.facts, "--facts", "experiment");
  require(c.test, "--test", "experiment");
  const Dataset data = load_dataset(c.rules, c.facts, c.valid, c.test);
  ExperimentConfig ec;
  ec.grounder = grounder_params(c);
  ec.depths = c.depths.empty() ? std::vector<std::size_t>{ec.grounder.depth} : c.depths;
  for (std::size_t d : ec.depths) {
    if (d == kUnbounded) throw ConfigError("--depths must be finite");
  }
  ec.tnorm = tnorm_kind(c);
  ec.steps = c.steps;
  ec.fixpoint = c.fixpoint;
  ec.kge = train_config(c);
  ec.seeds = seed_list(c);
  ec.eval = eval_options(c);
  ec.max_instances = c.max_instances;
  const ExperimentSummary s = run_experiment(data, ec, &out);
  open_output(c, "summary.json") << summary_json(s, ec) << "\n";
  std::ostringstream table;
  table << "baseline (embedding model only)\n";
  write_report_text(s.baseline, table);
  for (std::size_t i = 0; i < ec.depths.size(); ++i) {
    table << "\ndepth " << ec.depths[i] << "\n";
    write_report_text(s.depths[i], table);
  }
  open_output(c, "report.txt") << table.str();
  out << table.str();
  return kExitOk;
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--rules", c.rules, "Horn clause file")->check(CLI::ExistingFile);
  app.add_option("--facts", c.facts, "training facts (subject TAB relation TAB object)")->check(CLI::ExistingFile);
  app.add_option("--valid", c.valid, "validation facts")->check(CLI::ExistingFile);
  app.add_option("--test", c.test, "test facts")->check(CLI::ExistingFile);
  app.add_option("--roots", c.roots, "root atoms: a fact file or 'hb' for the Herbrand base")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--gmn", c.gmn, "grounded network file")->check(CLI::ExistingFile);
  app.add_option("--checkpoint", c.checkpoint, "embedding checkpoint")->check(CLI::ExistingFile);
  app.add_option("--scores", c.scores, "propagated score table")->check(CLI::ExistingFile);
  app.add_option("--width", c.width, "unknown body atoms per instance, or 'inf'")->capture_default_str();
  app.add_option("--depth", c.depth, "proof depth, or 'inf'")->capture_default_str();
  app.add_flag("--uncertain", c.uncertain, "accept instances with unproved unknown atoms");
  app.add_option("--cap", c.cap, "enumeration cap for uncertain grounding");
  app.add_option("--max-instances", c.max_instances, "refuse groundings larger than this")->capture_default_str();
  app.add_option("--tnorm", c.tnorm, "product, goedel or lukasiewicz")->capture_default_str();
  app.add_option("--steps", c.steps, "propagation steps (default: the depth)");
  app.add_flag("--fixpoint", c.fixpoint, "propagate until scores stop changing");
  app.add_option("--model", c.model, "complex or distmult")->capture_default_str();
  app.add_option("--dim", c.dim, "embedding dimension")->capture_default_str();
  app.add_option("--epochs", c.epochs, "training epochs")->capture_default_str();
  app.add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
  app.add_option("--negatives", c.negatives, "negatives per positive and side")->capture_default_str();
  app.add_option("--batch", c.batch, "positives per mini-batch")->capture_default_str();
  app.add_option("--l2", c.l2, "L2 penalty")->capture_default_str();
  app.add_option("--seed", c.seed, "base seed")->capture_default_str();
  app.add_option("--seeds", c.seeds, "number of runs, seeded seed..seed+n-1")->capture_default_str();
  app.add_option("--side", c.side, "head, tail or both")->capture_default_str();
  app.add_flag("--raw", c.raw, "rank without filtering known-true corruptions");
  app.add_option("--sample", c.sample, "rank against this many sampled corruptions per side");
  app.add_flag("--ranks", c.ranks, "also write per-query ranks");
  app.add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
  app.add_option("--depths", c.depths, "experiment depths; 0 is the embedding model alone")->delimiter(',');
  app.add_option("--target", c.target, "ablation query predicate (default: head of the first rule)");
  app.add_option("--hops", c.hops, "reasoning steps the ablation queries need")->capture_default_str();
  app.add_option("--queries", c.queries, "ablation queries")->capture_default_str();
  app.add_flag("--withhold-subject", c.withhold_subject, "withhold the query subject's other target facts");
}

int status_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kExitParse;
  if (dynamic_cast<const BudgetError*>(&e)) return kExitBudget;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  return kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Backward-chaining grounding, embedding training and neuro-symbolic evaluation"};
  app.name("bcg");
  CLI::Option* config = app.set_config("--config", "", "TOML file with option values; flags override it");
  add_options(app, c);
  app.require_subcommand(1, 1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ground", "ground the rules and write the network and its statistics"},
      {"stats", "ground the rules and report counts only"},
      {"train-kge", "train an embedding model and write a checkpoint"},
      {"propagate", "propagate scores over a grounded network"},
      {"eval", "rank test facts and write a report"},
      {"make-ablation", "build a split whose queries need an exact number of reasoning steps"},
      {"experiment", "train, ground, propagate and evaluate over several seeds"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + c.out + "': " + ec.message());
    open_output(c, "config.toml") << "# bcg " << command << "\n" << app.config_to_str(true, false);
    if (config->count() > 0 && !config->results().empty()) {
      std::ifstream in(config->results().front());
      std::ostringstream text;
      text << in.rdbuf();
      open_output(c, "config.input.toml") << text.str();
    }
    if (command == "ground") return cmd_ground(c, out, true);
    if (command == "stats") return cmd_ground(c, out, false);
    if (command == "train-kge") return cmd_train(c, out);
    if (command == "propagate") return cmd_propagate(c, out);
    if (command == "eval") return cmd_eval(c, out);
    if (command == "make-ablation") return cmd_ablation(c, out);
    return cmd_experiment(c, out);
  } catch (const std::exception& e) {
    const int status = status_for(e);
    err << "bcg: ";
    if (status == kExitParse) err << "parse error: ";
    if (status == kExitBudget) err << "budget exceeded: ";
    if (status == kExitNumeric) err << "numeric failure: ";
    if (status == kExitConfig) err << "configuration error: ";
    err << e.what() << "\n";
    return status;
  }
}

}  // namespace bcg
