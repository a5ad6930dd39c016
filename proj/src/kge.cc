#include "bcg/kge.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "bcg/errors.h"

namespace bcg {

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "complex") return ModelKind::complex;
  if (name == "distmult") return ModelKind::distmult;
  return std::nullopt;
}

std::string_view model_kind_name(ModelKind kind) { return kind == ModelKind::complex ? "complex" : "distmult"; }

std::vector<Triple> to_triples(std::span<const GroundAtom> facts) {
  std::vector<Triple> out;
  for (const GroundAtom& f : facts) {
    if (f.args.size() != 2) continue;
    out.push_back({raw(f.args[0]), raw(f.predicate), raw(f.args[1])});
  }
  return out;
}

EmbeddingModel::EmbeddingModel(ModelKind kind, std::size_t entities, std::size_t relations, std::size_t dim)
    : kind_(kind),
      entities_(entities),
      relations_(relations),
      dim_(dim),
      params_(2 * dim * (entities + relations), 0.0),
      entity_seen_(entities, false),
      relation_seen_(relations, false) {}

void EmbeddingModel::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(dim_)));
  for (std::size_t row = 0; row < entities_ + relations_; ++row) {
    double* p = params_.data() + 2 * dim_ * row;
    for (std::size_t k = 0; k < dim_; ++k) p[k] = normal(rng);
    for (std::size_t k = 0; k < dim_; ++k) p[dim_ + k] = kind_ == ModelKind::complex ? normal(rng) : 0.0;
  }
}

void EmbeddingModel::check(std::uint32_t s, std::uint32_t r, std::uint32_t o) const {
  if (s >= entities_ || o >= entities_) throw Error("entity id out of range for the embedding model");
  if (r >= relations_) throw Error("relation id out of range for the embedding model");
}

double EmbeddingModel::score(std::uint32_t s, std::uint32_t r, std::uint32_t o) const {
  check(s, r, o);
  const double* es = params_.data() + entity_offset(s);
  const double* wr = params_.data() + relation_offset(r);
  const double* eo = params_.data() + entity_offset(o);
  const std::size_t k = dim_;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = es[i], b = es[k + i];
    const double c = wr[i], d = wr[k + i];
    const double e = eo[i], f = eo[k + i];
    total += (a * c - b * d) * e + (a * d + b * c) * f;
  }
  return total;
}

double EmbeddingModel::probability(std::uint32_t s, std::uint32_t r, std::uint32_t o) const {
  return 1.0 / (1.0 + std::exp(-score(s, r, o)));
}

void EmbeddingModel::mark_trained(std::span<const Triple> facts) {
  for (const Triple& t : facts) {
    check(t.subject, t.relation, t.object);
    entity_seen_[t.subject] = true;
    entity_seen_[t.object] = true;
    relation_seen_[t.relation] = true;
  }
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double loss_and_gradient(const EmbeddingModel& model, std::span<const LabeledTriple> batch, std::vector<double>* grad) {
  const std::size_t k = model.dim();
  const std::vector<double>& p = model.parameters();
  const bool complex = model.kind() == ModelKind::complex;
  double total_weight = 0.0;
  for (const LabeledTriple& t : batch) total_weight += t.weight;
  if (total_weight <= 0.0) return 0.0;
  double loss = 0.0;
  for (const LabeledTriple& lt : batch) {
    const Triple& t = lt.triple;
    const double x = model.score(t.subject, t.relation, t.object);
    // BCE on logits: y * softplus(-x) + (1 - y) * softplus(x).
    loss += lt.weight * (lt.label * softplus(-x) + (1.0 - lt.label) * softplus(x));
    if (!grad) continue;
    const double g = lt.weight * (sigmoid(x) - lt.label) / total_weight;
    const std::size_t so = model.entity_offset(t.subject);
    const std::size_t ro = model.relation_offset(t.relation);
    const std::size_t oo = model.entity_offset(t.object);
    std::vector<double>& G = *grad;
    for (std::size_t i = 0; i < k; ++i) {
      const double a = p[so + i], b = p[so + k + i];
      const double c = p[ro + i], d = p[ro + k + i];
      const double e = p[oo + i], f = p[oo + k + i];
      G[so + i] += g * (c * e + d * f);
      G[ro + i] += g * (a * e + b * f);
      G[oo + i] += g * (a * c - b * d);
      if (complex) {
        G[so + k + i] += g * (c * f - d * e);
        G[ro + k + i] += g * (a * f - b * e);
        G[oo + k + i] += g * (a * d + b * c);
      }
    }
  }
  return loss / total_weight;
}

void TrainConfig::validate() const {
  if (dim == 0 || epochs == 0 || negatives == 0 || batch_size == 0 || !(learning_rate > 0.0) || l2 < 0.0) {
    throw Error("training sizes and the learning rate must be positive");
  }
}

TrainResult train(EmbeddingModel& model, std::span<const Triple> facts, const TrainConfig& config) {
  config.validate();
  if (facts.empty()) throw Error("cannot train on an empty fact set");
  model.mark_trained(facts);

  std::vector<std::uint32_t> entities;
  for (std::uint32_t e = 0; e < model.entity_count(); ++e) {
    if (model.entity_trained(e)) entities.push_back(e);
  }

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::vector<double>& params = model.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad(params.size(), 0.0);
  std::mt19937_64 rng(config.seed ^ 0x6b6765ULL);
  std::vector<std::size_t> order(facts.size());
  std::iota(order.begin(), order.end(), 0);
  const double negative_weight = 1.0 / static_cast<double>(2 * config.negatives);

  TrainResult result;
  std::vector<LabeledTriple> batch;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        const Triple& t = facts[order[i]];
        batch.push_back({t, 1.0, 1.0});
        for (std::size_t n = 0; n < config.negatives; ++n) {
          Triple h = t;
          h.subject = entities[rng() % entities.size()];
          batch.push_back({h, 0.0, negative_weight});
          Triple o = t;
          o.object = entities[rng() % entities.size()];
          batch.push_back({o, 0.0, negative_weight});
        }
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = loss_and_gradient(model, batch, &grad);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch + 1) +
                           "; try a smaller learning rate");
      }
      epoch_loss += loss * static_cast<double>(end - start);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      const bool complex = model.kind() == ModelKind::complex;
      const std::size_t k = model.dim();
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (!complex && (i / k) % 2 == 1) continue;  // imaginary block
        const double g = grad[i] + 2.0 * config.l2 * params[i];
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g * g;
        params[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
      }
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(facts.size()));
  }
  for (double x : params) {
    if (!std::isfinite(x)) throw NumericError("training produced non-finite parameters");
  }
  return result;
}

namespace {

void write_double(std::ostream& out, double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out << std::string_view(buf, end - buf);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

}  // namespace

void save_checkpoint(const EmbeddingModel& model, const SymbolTable& symbols, std::ostream& out) {
  if (symbols.constant_count() != model.entity_count() || symbols.predicate_count() != model.relation_count()) {
    throw Error("symbol table does not match the embedding model");
  }
  const std::size_t k = model.dim();
  out << "BCG-KGE\t" << kCheckpointVersion << "\n";
  out << "kind\t" << model_kind_name(model.kind()) << "\n";
  out << "dim\t" << k << "\n";
  out << "entities\t" << model.entity_count() << "\n";
  out << "relations\t" << model.relation_count() << "\n";
  auto row = [&](char tag, const std::string& name, bool seen, std::size_t offset) {
    out << tag << '\t' << name << '\t' << int{seen};
    for (std::size_t i = 0; i < 2 * k; ++i) {
      out << '\t';
      write_double(out, model.parameters()[offset + i]);
    }
    out << '\n';
  };
  for (std::uint32_t e = 0; e < model.entity_count(); ++e) {
    row('E', symbols.name(ConstantId{e}), model.entity_trained(e), model.entity_offset(e));
  }
  for (std::uint32_t r = 0; r < model.relation_count(); ++r) {
    row('R', symbols.name(PredicateId{r}), model.relation_trained(r), model.relation_offset(r));
  }
}

EmbeddingModel load_checkpoint(std::istream& in, const SymbolTable& symbols) {
  std::string line;
  std::size_t record = 0;
  auto fail = [&](const std::string& what) -> void {
    throw FormatError("checkpoint record " + std::to_string(record) + ": " + what);
  };
  auto next = [&]() {
    if (!std::getline(in, line)) fail("unexpected end of file");
    ++record;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return split(line);
  };
  auto count = [&](std::string_view key) -> std::size_t {
    auto f = next();
    std::size_t v = 0;
    if (f.size() != 2 || f[0] != key ||
        std::from_chars(f[1].data(), f[1].data() + f[1].size(), v).ptr != f[1].data() + f[1].size()) {
      fail("expected '" + std::string(key) + "\t<count>'");
    }
    return v;
  };
  auto header = next();
  if (header.size() != 2 || header[0] != "BCG-KGE") fail("not a checkpoint (missing 'BCG-KGE' header)");
  if (header[1] != std::to_string(kCheckpointVersion)) {
    fail("unsupported checkpoint version '" + std::string(header[1]) + "'");
  }
  auto kind_line = next();
  std::optional<ModelKind> kind;
  if (kind_line.size() == 2 && kind_line[0] == "kind") kind = parse_model_kind(kind_line[1]);
  if (!kind) fail("expected 'kind\tcomplex|distmult'");
  const std::size_t k = count("dim");
  if (k == 0) fail("dimension must be positive");
  const std::size_t n_entities = count("entities");
  const std::size_t n_relations = count("relations");

  EmbeddingModel model(*kind, symbols.constant_count(), symbols.predicate_count(), k);
  for (std::size_t i = 0; i < n_entities + n_relations; ++i) {
    auto f = next();
    const char tag = i < n_entities ? 'E' : 'R';
    if (f.size() != 3 + 2 * k || f[0].size() != 1 || f[0][0] != tag) {
      fail(std::string("expected a '") + tag + "' row with " + std::to_string(2 * k) + " values");
    }
    std::vector<double> values(2 * k);
    for (std::size_t j = 0; j < 2 * k; ++j) {
      const std::string_view s = f[3 + j];
      if (std::from_chars(s.data(), s.data() + s.size(), values[j]).ptr != s.data() + s.size() ||
          !std::isfinite(values[j])) {
        fail("invalid value '" + std::string(s) + "'");
      }
    }
    std::optional<std::size_t> offset;
    const bool trained = f[2] == "1";
    if (tag == 'E') {
      if (auto c = symbols.find_constant(f[1])) {
        offset = model.entity_offset(raw(*c));
        if (trained) model.set_entity_trained(raw(*c));
      }
    } else if (auto p = symbols.find_predicate(f[1])) {
      offset = model.relation_offset(raw(*p));
      if (trained) model.set_relation_trained(raw(*p));
    }
    if (offset) std::copy(values.begin(), values.end(), model.parameters().begin() + *offset);
  }
  return model;
}

}  // namespace bcg
