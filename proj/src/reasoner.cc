#include "bcg/reasoner.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "bcg/errors.h"

namespace bcg {

std::optional<TNormKind> parse_tnorm(std::string_view name) {
  if (name == "product") return TNormKind::product;
  if (name == "goedel" || name == "godel" || name == "min") return TNormKind::goedel;
  if (name == "lukasiewicz") return TNormKind::lukasiewicz;
  return std::nullopt;
}

std::string_view tnorm_name(TNormKind kind) {
  switch (kind) {
    case TNormKind::product:
      return "product";
    case TNormKind::goedel:
      return "goedel";
    case TNormKind::lukasiewicz:
      return "lukasiewicz";
  }
  return "?";
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::known_fact:
      return "known";
    case Provenance::kge_initial:
      return "initial";
    case Provenance::propagated:
      return "propagated";
  }
  return "?";
}

namespace {

double tnorm_unchecked(TNormKind kind, std::span<const double> v) {
  switch (kind) {
    case TNormKind::product: {
      double p = 1.0;
      for (double x : v) p *= x;
      return p;
    }
    case TNormKind::goedel:
      return *std::min_element(v.begin(), v.end());
    case TNormKind::lukasiewicz: {
      double s = 0.0;
      for (double x : v) s += x;
      return std::max(0.0, s - static_cast<double>(v.size() - 1));
    }
  }
  return 0.0;
}

}  // namespace

double tnorm_eval(TNormKind kind, std::span<const double> values) {
  if (values.empty()) throw Error("t-norm of an empty sequence");
  for (double x : values) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error("t-norm argument " + std::to_string(x) + " outside [0, 1]");
  }
  return tnorm_unchecked(kind, values);
}

ScoreTable initial_scores(const GroundedNetwork& net,
                          const std::function<std::optional<double>(const GroundAtom&)>& scorer) {
  ScoreTable t;
  t.scores.reserve(net.nodes().size());
  t.provenance.reserve(net.nodes().size());
  for (const GmnNode& n : net.nodes()) {
    if (n.known) {
      t.scores.push_back(1.0);
      t.provenance.push_back(Provenance::known_fact);
      continue;
    }
    const std::optional<double> s = scorer ? scorer(n.atom) : std::nullopt;
    if (s && !(*s >= 0.0 && *s <= 1.0)) throw NumericError("initial score outside [0, 1]");
    t.scores.push_back(s.value_or(kUnseenAtomScore));
    t.provenance.push_back(Provenance::kge_initial);
  }
  return t;
}

PropagationResult propagate(const GroundedNetwork& net, const ScoreTable& init, const PropagationOptions& options) {
  const std::size_t n = net.nodes().size();
  if (init.scores.size() != n || init.provenance.size() != n) {
    throw Error("score table has " + std::to_string(init.scores.size()) + " entries for a network of " +
                std::to_string(n) + " nodes");
  }
  for (double s : init.scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw NumericError("initial score outside [0, 1]");
  }
  PropagationResult result;
  std::vector<double> current = init.scores;
  std::vector<double> next(n);
  const std::size_t limit = options.steps.value_or(n);
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, n));

  auto update = [&](std::size_t lo, std::size_t hi, double& max_delta) {
    std::vector<double> body;
    for (std::size_t h = lo; h < hi; ++h) {
      double best = init.scores[h];
      for (std::uint32_t e : net.incoming(static_cast<std::uint32_t>(h))) {
        const GmnEdge& edge = net.edges()[e];
        body.clear();
        for (std::uint32_t b : edge.body) body.push_back(current[b]);
        best = std::max(best, tnorm_unchecked(options.tnorm, body));
      }
      next[h] = best;
      max_delta = std::max(max_delta, std::abs(best - current[h]));
    }
  };

  while (result.steps_run < limit) {
    double delta = 0.0;
    if (jobs == 1) {
      update(0, n, delta);
    } else {
      std::vector<double> deltas(jobs, 0.0);
      std::vector<std::thread> threads;
      for (std::size_t j = 0; j < jobs; ++j) {
        threads.emplace_back(update, n * j / jobs, n * (j + 1) / jobs, std::ref(deltas[j]));
      }
      for (std::thread& t : threads) t.join();
      delta = *std::max_element(deltas.begin(), deltas.end());
    }
    current.swap(next);
    ++result.steps_run;
    if (delta <= options.epsilon) {
      result.converged = true;
      if (!options.steps) break;
    }
  }
  if (!options.steps && n == 0) result.converged = true;

  result.scores.scores = std::move(current);
  result.scores.provenance = init.provenance;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.scores.scores[i] > init.scores[i]) result.scores.provenance[i] = Provenance::propagated;
  }
  return result;
}

void write_scores(const GroundedNetwork& net, const ScoreTable& table, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < table.scores.size(); ++i) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, table.scores[i]);
    out << net.atom_text(static_cast<std::uint32_t>(i)) << '\t' << std::string_view(buf, end - buf) << '\n';
  }
}

std::vector<std::pair<std::string, double>> read_scores(std::istream& in) {
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("score line " + std::to_string(line_no) + ": expected 'atom<TAB>score'");
    }
    double v = 0.0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !(v >= 0.0 && v <= 1.0)) {
      throw FormatError("score line " + std::to_string(line_no) + ": invalid score '" + std::string(first, last) +
                        "'");
    }
    out.emplace_back(line.substr(0, tab), v);
  }
  return out;
}

}  // namespace bcg
