// ComplEx and DistMult triple scorers with a small Adam trainer.
#ifndef BCG_KGE_H_
#define BCG_KGE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcg/fact_store.h"
#include "bcg/logic.h"

namespace bcg {

enum class ModelKind { complex, distmult };

std::optional<ModelKind> parse_model_kind(std::string_view name);
std::string_view model_kind_name(ModelKind kind);

struct Triple {
  std::uint32_t subject = 0;
  std::uint32_t relation = 0;
  std::uint32_t object = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Binary facts as triples; facts of other arities are skipped.
std::vector<Triple> to_triples(std::span<const GroundAtom> facts);

// Entity vectors then relation vectors, each stored as k real parts followed
// by k imaginary parts. DistMult keeps the imaginary parts at zero.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(ModelKind kind, std::size_t entities, std::size_t relations, std::size_t dim);

  ModelKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t entity_count() const { return entities_; }
  std::size_t relation_count() const { return relations_; }

  // Normal entries with standard deviation 1/sqrt(dim).
  void initialize(std::uint64_t seed);

  // Re(sum_k e_s[k] * w_r[k] * conj(e_o[k])). Throws Error on an id out of range.
  double score(std::uint32_t s, std::uint32_t r, std::uint32_t o) const;
  double probability(std::uint32_t s, std::uint32_t r, std::uint32_t o) const;

  // Entities and relations that occurred in the training facts.
  bool entity_trained(std::uint32_t e) const { return e < entity_seen_.size() && entity_seen_[e]; }
  bool relation_trained(std::uint32_t r) const { return r < relation_seen_.size() && relation_seen_[r]; }
  void mark_trained(std::span<const Triple> facts);
  void set_entity_trained(std::uint32_t e) { entity_seen_.at(e) = true; }
  void set_relation_trained(std::uint32_t r) { relation_seen_.at(r) = true; }

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  std::size_t entity_offset(std::uint32_t e) const { return 2 * dim_ * e; }
  std::size_t relation_offset(std::uint32_t r) const { return 2 * dim_ * (entities_ + r); }

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

 private:
  void check(std::uint32_t s, std::uint32_t r, std::uint32_t o) const;

  ModelKind kind_ = ModelKind::complex;
  std::size_t entities_ = 0;
  std::size_t relations_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> params_;
  std::vector<bool> entity_seen_;
  std::vector<bool> relation_seen_;
};

struct LabeledTriple {
  Triple triple;
  double label = 1.0;
  double weight = 1.0;
};

// Weighted binary cross-entropy of sigmoid(score), divided by the total
// weight. Adds the gradient into `grad` when given (sized like parameters()).
double loss_and_gradient(const EmbeddingModel& model, std::span<const LabeledTriple> batch, std::vector<double>* grad);

struct TrainConfig {
  ModelKind kind = ModelKind::complex;
  std::size_t dim = 100;
  double learning_rate = 1e-2;
  std::size_t epochs = 100;
  std::size_t negatives = 32;  // per positive, per side
  std::size_t batch_size = 512;
  std::uint64_t seed = 0;
  double l2 = 0.0;

  // Throws Error unless every size and the learning rate are positive.
  void validate() const;
};

struct TrainResult {
  std::vector<double> epoch_losses;
};

// Adam over positives (label 1) and uniformly sampled head and tail
// corruptions (label 0); positives and negatives carry equal total weight.
// Throws NumericError on a non-finite loss.
TrainResult train(EmbeddingModel& model, std::span<const Triple> facts, const TrainConfig& config);

inline constexpr int kCheckpointVersion = 1;

// Text checkpoint with entity and relation names; see docs/checkpoint-format.md.
void save_checkpoint(const EmbeddingModel& model, const SymbolTable& symbols, std::ostream& out);
// Rows are matched to `symbols` by name; names absent from `symbols` are
// ignored and symbols absent from the file stay untrained. Throws FormatError.
EmbeddingModel load_checkpoint(std::istream& in, const SymbolTable& symbols);

}  // namespace bcg

#endif  // BCG_KGE_H_
