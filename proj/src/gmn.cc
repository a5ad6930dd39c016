#include "bcg/gmn.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "bcg/errors.h"

namespace bcg {

GroundedNetwork::GroundedNetwork(std::vector<std::string> predicates, std::vector<std::size_t> arities,
                                 std::vector<std::string> constants, std::vector<GmnNode> nodes,
                                 std::vector<GmnEdge> edges)
    : predicates_(std::move(predicates)),
      arities_(std::move(arities)),
      constants_(std::move(constants)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  std::vector<std::uint32_t> order(edges_.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (edges_[a].head != edges_[b].head) return edges_[a].head < edges_[b].head;
    return edges_[a].rule_id < edges_[b].rule_id;
  });
  incoming_offsets_.assign(nodes_.size() + 1, 0);
  for (const GmnEdge& e : edges_) ++incoming_offsets_[e.head + 1];
  for (std::size_t i = 0; i < nodes_.size(); ++i) incoming_offsets_[i + 1] += incoming_offsets_[i];
  incoming_ = std::move(order);
}

std::span<const std::uint32_t> GroundedNetwork::incoming(std::uint32_t node) const {
  return std::span<const std::uint32_t>(incoming_).subspan(incoming_offsets_[node],
                                                           incoming_offsets_[node + 1] - incoming_offsets_[node]);
}

std::vector<std::span<const std::uint32_t>> GroundedNetwork::incoming_by_rule(std::uint32_t node) const {
  std::vector<std::span<const std::uint32_t>> groups;
  const std::span<const std::uint32_t> all = incoming(node);
  std::size_t start = 0;
  for (std::size_t i = 1; i <= all.size(); ++i) {
    if (i == all.size() || edges_[all[i]].rule_id != edges_[all[start]].rule_id) {
      groups.push_back(all.subspan(start, i - start));
      start = i;
    }
  }
  return groups;
}

std::string GroundedNetwork::atom_text(std::uint32_t node) const {
  const GroundAtom& a = nodes_[node].atom;
  std::string s = predicates_[raw(a.predicate)] + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += constants_[raw(a.args[i])];
  }
  return s + ")";
}

GroundedNetwork build_gmn(const GroundingResult& result, const FactStore& store, const SymbolTable& symbols) {
  std::vector<std::string> predicates;
  std::vector<std::size_t> arities;
  for (std::uint32_t p = 0; p < symbols.predicate_count(); ++p) {
    predicates.push_back(symbols.name(PredicateId{p}));
    arities.push_back(symbols.arity(PredicateId{p}));
  }
  std::vector<std::string> constants;
  for (std::uint32_t c = 0; c < symbols.constant_count(); ++c) constants.push_back(symbols.name(ConstantId{c}));

  std::vector<GmnNode> nodes;
  nodes.reserve(result.atoms.size());
  for (const GroundAtom& a : result.atoms.atoms()) nodes.push_back({a, store.contains(a), false});
  for (AtomId r : result.roots) nodes[raw(r)].root = true;

  std::vector<GmnEdge> edges;
  edges.reserve(result.instances.size());
  for (const GroundRuleInstance& g : result.instances) {
    GmnEdge e{g.rule_id, raw(g.head), {}};
    for (AtomId b : g.body) e.body.push_back(raw(b));
    edges.push_back(std::move(e));
  }
  return GroundedNetwork(std::move(predicates), std::move(arities), std::move(constants), std::move(nodes),
                         std::move(edges));
}

GmnStats gmn_stats(const GroundedNetwork& net) {
  GmnStats s;
  s.nodes = net.nodes().size();
  s.edges = net.edges().size();
  for (std::uint32_t i = 0; i < s.nodes; ++i) {
    s.known_nodes += net.nodes()[i].known;
    s.root_nodes += net.nodes()[i].root;
    s.max_in_degree = std::max(s.max_in_degree, net.incoming(i).size());
  }
  for (const GmnEdge& e : net.edges()) ++s.edges_per_rule[e.rule_id];
  return s;
}

namespace {

void check_name(const std::string& name) {
  if (name.empty() || name.find_first_of("\t\n\r") != std::string::npos) {
    throw FormatError("symbol name '" + name + "' cannot be written: empty or contains a tab or newline");
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> next(std::string_view what) {
    while (std::getline(in_, line_)) {
      ++record_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (!line_.empty()) return split_tabs(line_);
    }
    fail("unexpected end of file, expected " + std::string(what));
  }

  std::uint64_t number(std::string_view field, std::uint64_t limit) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail("expected a non-negative integer, got '" + std::string(field) + "'");
    }
    if (v >= limit) fail("value " + std::string(field) + " out of range (limit " + std::to_string(limit) + ")");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("GMN record " + std::to_string(record_) + ": " + what);
  }

  bool at_end() {
    std::string rest;
    while (std::getline(in_, rest)) {
      if (!rest.empty() && rest != "\r") return false;
    }
    return true;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t record_ = 0;
};

}  // namespace

void export_gmn(const GroundedNetwork& net, std::ostream& out) {
  out << "BCG-GMN\t" << kGmnFormatVersion << "\n";
  out << "predicates\t" << net.predicate_names().size() << "\n";
  out << "constants\t" << net.constant_names().size() << "\n";
  out << "nodes\t" << net.nodes().size() << "\n";
  out << "edges\t" << net.edges().size() << "\n";
  for (std::size_t p = 0; p < net.predicate_names().size(); ++p) {
    check_name(net.predicate_names()[p]);
    out << "P\t" << p << "\t" << net.predicate_arities()[p] << "\t" << net.predicate_names()[p] << "\n";
  }
  for (std::size_t c = 0; c < net.constant_names().size(); ++c) {
    check_name(net.constant_names()[c]);
    out << "C\t" << c << "\t" << net.constant_names()[c] << "\n";
  }
  for (std::size_t i = 0; i < net.nodes().size(); ++i) {
    const GmnNode& n = net.nodes()[i];
    out << "N\t" << i << "\t" << raw(n.atom.predicate) << "\t" << int{n.known} << "\t" << int{n.root};
    for (ConstantId c : n.atom.args) out << "\t" << raw(c);
    out << "\n";
  }
  for (const GmnEdge& e : net.edges()) {
    out << "E\t" << e.rule_id << "\t" << e.head;
    for (std::uint32_t b : e.body) out << "\t" << b;
    out << "\n";
  }
  if (!out) throw Error("failed writing GMN output");
}

GroundedNetwork import_gmn(std::istream& in) {
  Reader r(in);
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint32_t>::max();
  auto header = r.next("header");
  if (header.size() != 2 || header[0] != "BCG-GMN") r.fail("not a GMN file (missing 'BCG-GMN' header)");
  if (header[1] != std::to_string(kGmnFormatVersion)) {
    r.fail("unsupported GMN format version '" + std::string(header[1]) + "' (this reader supports version " +
           std::to_string(kGmnFormatVersion) + ")");
  }
  auto count = [&](std::string_view key) {
    auto f = r.next(key);
    if (f.size() != 2 || f[0] != key) r.fail("expected '" + std::string(key) + "\t<count>'");
    return r.number(f[1], kMax);
  };
  const std::uint64_t n_pred = count("predicates");
  const std::uint64_t n_const = count("constants");
  const std::uint64_t n_nodes = count("nodes");
  const std::uint64_t n_edges = count("edges");

  std::vector<std::string> predicates;
  std::vector<std::size_t> arities;
  for (std::uint64_t i = 0; i < n_pred; ++i) {
    auto f = r.next("predicate record");
    if (f.size() != 4 || f[0] != "P") r.fail("expected 'P\tid\tarity\tname'");
    if (r.number(f[1], kMax) != i) r.fail("predicate ids must be consecutive from 0");
    arities.push_back(r.number(f[2], 64));
    if (f[3].empty()) r.fail("empty predicate name");
    predicates.emplace_back(f[3]);
  }
  std::vector<std::string> constants;
  for (std::uint64_t i = 0; i < n_const; ++i) {
    auto f = r.next("constant record");
    if (f.size() != 3 || f[0] != "C") r.fail("expected 'C\tid\tname'");
    if (r.number(f[1], kMax) != i) r.fail("constant ids must be consecutive from 0");
    if (f[2].empty()) r.fail("empty constant name");
    constants.emplace_back(f[2]);
  }
  std::vector<GmnNode> nodes;
  for (std::uint64_t i = 0; i < n_nodes; ++i) {
    auto f = r.next("node record");
    if (f.size() < 5 || f[0] != "N") r.fail("expected 'N\tid\tpredicate\tknown\troot\targs...'");
    if (r.number(f[1], kMax) != i) r.fail("node ids must be consecutive from 0");
    GmnNode n;
    n.atom.predicate = PredicateId{static_cast<std::uint32_t>(r.number(f[2], n_pred))};
    n.known = r.number(f[3], 2) == 1;
    n.root = r.number(f[4], 2) == 1;
    if (f.size() - 5 != arities[raw(n.atom.predicate)]) r.fail("argument count does not match predicate arity");
    for (std::size_t k = 5; k < f.size(); ++k) {
      n.atom.args.push_back(ConstantId{static_cast<std::uint32_t>(r.number(f[k], n_const))});
    }
    nodes.push_back(std::move(n));
  }
  std::vector<GmnEdge> edges;
  for (std::uint64_t i = 0; i < n_edges; ++i) {
    auto f = r.next("edge record");
    if (f.size() < 4 || f[0] != "E") r.fail("expected 'E\trule\thead\tbody...'");
    GmnEdge e;
    e.rule_id = r.number(f[1], kMax);
    e.head = static_cast<std::uint32_t>(r.number(f[2], n_nodes));
    for (std::size_t k = 3; k < f.size(); ++k) e.body.push_back(static_cast<std::uint32_t>(r.number(f[k], n_nodes)));
    edges.push_back(std::move(e));
  }
  if (!r.at_end()) r.fail("trailing data after the declared records");
  return GroundedNetwork(std::move(predicates), std::move(arities), std::move(constants), std::move(nodes),
                         std::move(edges));
}

void export_gmn_file(const GroundedNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  export_gmn(net, out);
}

GroundedNetwork import_gmn_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return import_gmn(in);
}

}  // namespace bcg
