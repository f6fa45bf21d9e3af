#include "stratinf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

#include "stratinf/errors.hpp"
#include "stratinf/rng.hpp"

namespace stratinf {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

NodeId LabeledNetwork::id_of(std::string_view label) const {
  const auto it = index.find(std::string(label));
  if (it == index.end()) throw InputError("unknown node label '" + std::string(label) + "'");
  return it->second;
}

double weight_to_prob(double w) {
  if (!(w >= 0.0)) throw InputError("weight must be non-negative");
  return -std::expm1(-w / 2.0);
}

std::optional<RawEdgeRecord> parse_edge_line(std::string_view line, ValueKind kind,
                                             std::size_t line_no) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  const auto tokens = split_ws(line);
  if (tokens.empty()) return std::nullopt;
  if (tokens.size() != 3) {
    throw ParseError(line_no, "expected 'src dst value', got " + std::to_string(tokens.size()) +
                                  " field(s)");
  }
  double value = 0.0;
  const auto tok = tokens[2];
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
    throw ParseError(line_no, "invalid number '" + std::string(tok) + "'");
  }
  if (value < 0.0) {
    throw InputError("line " + std::to_string(line_no) + ": negative value " + std::string(tok));
  }
  if (kind == ValueKind::Probability && value > 1.0) {
    throw InputError("line " + std::to_string(line_no) + ": probability " + std::string(tok) +
                     " outside [0, 1]");
  }
  return RawEdgeRecord{std::string(tokens[0]), std::string(tokens[1]), value, kind};
}

LabeledNetwork parse_edge_list(std::istream& in, ValueKind kind) {
  LabeledNetwork out;
  std::vector<Edge> edges;
  const auto intern = [&](const std::string& label) {
    const auto [it, inserted] = out.index.try_emplace(label, static_cast<NodeId>(out.labels.size()));
    if (inserted) out.labels.push_back(label);
    return it->second;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto rec = parse_edge_line(line, kind, line_no);
    if (!rec) continue;
    const NodeId src = intern(rec->src);
    const NodeId dst = intern(rec->dst);
    const double p = kind == ValueKind::Weight ? weight_to_prob(rec->value) : rec->value;
    edges.push_back({static_cast<EdgeId>(edges.size()), src, dst, p});
  }
  if (in.bad()) throw std::runtime_error("read error while parsing edge list");
  out.network = InfluenceNetwork(out.labels.size(), std::move(edges));
  return out;
}

LabeledNetwork load_edge_list(const std::filesystem::path& path, ValueKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_edge_list(in, kind);
}

void write_edge_list(std::ostream& out, const InfluenceNetwork& net,
                     std::span<const std::string> labels) {
  if (!labels.empty() && labels.size() != net.node_count()) {
    throw InputError("label table does not match node count");
  }
  char buf[64];
  for (const Edge& e : net.edges()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, e.prob);
    if (labels.empty()) {
      out << e.src << ' ' << e.dst << ' ';
    } else {
      out << labels[e.src] << ' ' << labels[e.dst] << ' ';
    }
    out.write(buf, res.ptr - buf);
    out << '\n';
  }
}

std::size_t GeneratorSpec::edge_target() const {
  return static_cast<std::size_t>(std::llround(density * static_cast<double>(nodes)));
}

void GeneratorSpec::validate() const {
  if (nodes < 1) throw InputError("generator needs at least one node");
  if (!(density >= 0.0) || !std::isfinite(density)) throw InputError("density must be >= 0");
  const double pairs = static_cast<double>(nodes) * static_cast<double>(nodes - 1);
  if (density * static_cast<double>(nodes) > pairs ||
      static_cast<double>(edge_target()) > pairs) {
    throw InputError("density " + std::to_string(density) + " infeasible for " +
                     std::to_string(nodes) + " nodes (at most n - 1)");
  }
  if (prob_law == ProbLaw::Constant && !(constant >= 0.0 && constant <= 1.0)) {
    throw InputError("constant probability must lie in [0, 1]");
  }
}

InfluenceNetwork generate_er(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::uint64_t n = spec.nodes;
  const std::uint64_t pairs = n * (n - 1);
  const std::uint64_t m = spec.edge_target();

  // Floyd's sampling of m distinct indices from [0, pairs).
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(m * 2);
  for (std::uint64_t j = pairs - m; j < pairs; ++j) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> picks(chosen.begin(), chosen.end());
  std::sort(picks.begin(), picks.end());

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::geometric_distribution<int> geom(0.5);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t k : picks) {
    const auto src = static_cast<NodeId>(k / (n - 1));
    const auto w = static_cast<NodeId>(k % (n - 1));
    const NodeId dst = w < src ? w : w + 1;
    double p = 0.0;
    switch (spec.prob_law) {
      case ProbLaw::Uniform01: p = unit(rng); break;
      case ProbLaw::Constant: p = spec.constant; break;
      case ProbLaw::FromWeights: p = weight_to_prob(1.0 + geom(rng)); break;
    }
    edges.push_back({static_cast<EdgeId>(edges.size()), src, dst, p});
  }
  return InfluenceNetwork(spec.nodes, std::move(edges));
}

std::string_view to_string(ProbLaw law) {
  switch (law) {
    case ProbLaw::Uniform01: return "uniform01";
    case ProbLaw::Constant: return "constant";
    case ProbLaw::FromWeights: return "from-weights";
  }
  return "?";
}

}  // namespace stratinf
