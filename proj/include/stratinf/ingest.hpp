#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stratinf/graph.hpp"

namespace stratinf {

enum class ValueKind { Probability, Weight };

struct RawEdgeRecord {
  std::string src;
  std::string dst;
  double value = 0.0;
  ValueKind kind = ValueKind::Probability;
};

/// A network together with the dense relabeling of its input node labels.
struct LabeledNetwork {
  InfluenceNetwork network;
  std::vector<std::string> labels;  // labels[id] is the original label
  std::unordered_map<std::string, NodeId> index;

  // Throws InputError for an unknown label.
  NodeId id_of(std::string_view label) const;
};

// Exponential CDF with mean 2: 1 - exp(-w / 2). Throws InputError for w < 0.
double weight_to_prob(double w);

// Parses one "src dst value" line. Returns nullopt for blank and comment lines.
// Throws ParseError for malformed lines and InputError for out-of-range values.
std::optional<RawEdgeRecord> parse_edge_line(std::string_view line, ValueKind kind,
                                             std::size_t line_no);

// Labels are mapped to dense ids in first-appearance order.
LabeledNetwork parse_edge_list(std::istream& in, ValueKind kind);
LabeledNetwork load_edge_list(const std::filesystem::path& path, ValueKind kind);

// Writes "src dst prob" lines with round-trip precision. Uses `labels` when
// given, otherwise the dense ids.
void write_edge_list(std::ostream& out, const InfluenceNetwork& net,
                     std::span<const std::string> labels = {});

enum class ProbLaw { Uniform01, Constant, FromWeights };

struct GeneratorSpec {
  std::size_t nodes = 1;
  double density = 0.0;  // mean out-edges per node
  ProbLaw prob_law = ProbLaw::Uniform01;
  double constant = 0.1;  // used by ProbLaw::Constant
  std::uint64_t seed = 0;

  std::size_t edge_target() const;
  // Throws InputError when the spec is infeasible.
  void validate() const;
};

// G(n, m) directed Erdos-Renyi graph: round(density * n) distinct ordered
// pairs without self-loops, sorted by (src, dst). FromWeights draws integer
// weights 1 + Geometric(1/2) and maps them through weight_to_prob.
InfluenceNetwork generate_er(const GeneratorSpec& spec);

std::string_view to_string(ProbLaw law);

}  // namespace stratinf
