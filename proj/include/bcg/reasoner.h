// Fuzzy score propagation over a grounded network.
#ifndef BCG_REASONER_H_
#define BCG_REASONER_H_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bcg/gmn.h"

namespace bcg {

enum class TNormKind { product, goedel, lukasiewicz };

std::optional<TNormKind> parse_tnorm(std::string_view name);
std::string_view tnorm_name(TNormKind kind);

// Throws Error on an empty input or a value outside [0, 1].
double tnorm_eval(TNormKind kind, std::span<const double> values);

enum class Provenance { known_fact, kge_initial, propagated };

std::string_view provenance_name(Provenance p);

// One entry per network node.
struct ScoreTable {
  std::vector<double> scores;
  std::vector<Provenance> provenance;

  std::size_t size() const { return scores.size(); }
};

inline constexpr double kUnseenAtomScore = 0.5;

// Known facts score 1. Other atoms take `scorer`'s value, or
// kUnseenAtomScore when it returns nullopt.
ScoreTable initial_scores(const GroundedNetwork& net,
                          const std::function<std::optional<double>(const GroundAtom&)>& scorer);

struct PropagationOptions {
  TNormKind tnorm = TNormKind::product;
  std::optional<std::size_t> steps;  // nullopt: run to a fixpoint
  double epsilon = 1e-9;
  std::size_t jobs = 1;
};

struct PropagationResult {
  ScoreTable scores;
  std::size_t steps_run = 0;
  bool converged = false;
};

// Synchronous updates:
//   o'(h) = max(o0(h), max over edges g into h of tnorm(o(b) for b in body(g))).
// Fixpoint mode stops once no score moves by more than epsilon, or after
// |nodes| steps. Throws Error if `init` does not cover every node.
PropagationResult propagate(const GroundedNetwork& net, const ScoreTable& init, const PropagationOptions& options);

// `atom<TAB>score` lines in node order; scores in shortest round-trip form.
void write_scores(const GroundedNetwork& net, const ScoreTable& table, std::ostream& out);
// Throws FormatError on a malformed line or a score outside [0, 1].
std::vector<std::pair<std::string, double>> read_scores(std::istream& in);

}  // namespace bcg

#endif  // BCG_REASONER_H_
