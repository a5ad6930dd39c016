// End-to-end pipeline: train the embedding model, ground the test queries and
// their corruptions, propagate scores over the network and rank.
#ifndef BCG_EXPERIMENT_H_
#define BCG_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcg/eval.h"
#include "bcg/fact_store.h"
#include "bcg/gmn.h"
#include "bcg/grounder.h"
#include "bcg/kge.h"
#include "bcg/logic.h"
#include "bcg/reasoner.h"

namespace bcg {

struct Dataset {
  Theory theory;  // rules plus every symbol of the fact files
  std::vector<GroundAtom> train;
  std::vector<GroundAtom> valid;
  std::vector<GroundAtom> test;
};

// Empty paths are skipped. Throws ParseError or Error.
Dataset load_dataset(const std::string& rules, const std::string& train, const std::string& valid,
                     const std::string& test);

// o0 for one atom: sigmoid of the embedding score, or nullopt when the atom
// is not binary or mentions a symbol the model never trained on.
std::optional<double> initial_score(const EmbeddingModel& model, const GroundAtom& atom);

// Trained entities, ascending.
std::vector<std::uint32_t> vocabulary(const EmbeddingModel& model);

// Test queries plus every corruption `evaluate` will rank, deduplicated in
// first-occurrence order.
std::vector<GroundAtom> ranking_roots(const Dataset& data, std::span<const std::uint32_t> entities,
                                      const std::set<Triple>& filter, const EvalOptions& options);

struct ExperimentConfig {
  GrounderParams grounder;  // depth is taken from `depths`
  std::vector<std::size_t> depths{1};  // 0 ranks with the embedding model alone
  TNormKind tnorm = TNormKind::product;
  std::optional<std::size_t> steps;  // default: the grounding depth
  bool fixpoint = false;
  TrainConfig kge;
  std::vector<std::uint64_t> seeds{0};
  EvalOptions eval;
  std::uint64_t max_instances = 50'000'000;
};

struct DepthResult {
  std::size_t depth = 0;
  RankingReport report;
  GmnStats network;
  GroundingStats grounding;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> losses;
  RankingReport baseline;
  std::vector<DepthResult> depths;
};

struct ExperimentSummary {
  std::vector<SeedResult> runs;
  RankingReport baseline;             // averaged over seeds
  std::vector<RankingReport> depths;  // averaged over seeds, one per configured depth
};

// `log`, when given, receives one progress line per stage.
ExperimentSummary run_experiment(const Dataset& data, const ExperimentConfig& config, std::ostream* log = nullptr);

std::string summary_json(const ExperimentSummary& summary, const ExperimentConfig& config);

}  // namespace bcg

#endif  // BCG_EXPERIMENT_H_
