#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stratinf/rng.hpp"

namespace stratinf {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  EdgeId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double prob = 0.0;
};

/// Directed graph whose edges exist independently with probability `prob`
/// (the independent-cascade model viewed as an uncertain graph).
///
/// Immutable once built. Out-adjacency lists keep the input edge order per
/// source node, which fixes BFS tie-breaking. Parallel edges are independent
/// Bernoulli variables; self-loops are accepted and counted but never change
/// reachability.
class InfluenceNetwork {
 public:
  InfluenceNetwork() = default;

  // Edge ids must be dense: edges[i].id == i. Throws InputError otherwise,
  // or when an endpoint is out of range or a probability is outside [0, 1].
  InfluenceNetwork(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool contains(NodeId v) const noexcept { return v < node_count_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const EdgeId> out_edges(NodeId v) const noexcept {
    return {out_edges_.data() + out_offsets_[v], out_edges_.data() + out_offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const noexcept { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t self_loop_count() const noexcept { return self_loops_; }

  // One biased coin for edge e. Always consumes exactly one draw.
  bool flip(EdgeId e, Rng& rng) const {
    const std::uint64_t cut = coin_cut_[e];
    return rng() < cut || cut == UINT64_MAX;
  }

  // 32-bit threshold for edge e: a uniform 32-bit word u means "present" iff
  // u < half_cut(e). Exact for p = 0 and p = 1, otherwise resolution 2^-32.
  std::uint64_t half_cut(EdgeId e) const noexcept { return half_cut_[e]; }
  // Concatenated out-adjacency lists (CSR order): node v owns positions
  // [out_offset(v), out_offset(v + 1)).
  std::size_t out_offset(NodeId v) const noexcept { return out_offsets_[v]; }
  std::span<const EdgeId> adjacency_edges() const noexcept { return out_edges_; }
  std::span<const NodeId> adjacency_targets() const noexcept { return out_dst_; }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<EdgeId> out_edges_;
  std::vector<NodeId> out_dst_;
  std::vector<std::uint64_t> coin_cut_;
  std::vector<std::uint64_t> half_cut_;
  std::size_t self_loops_ = 0;
};

/// Incremental construction helper; ids are assigned in insertion order.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(std::size_t node_count = 0) : node_count_(node_count) {}

  EdgeId add_edge(NodeId src, NodeId dst, double prob);
  // Grows the node count if needed and returns the id.
  NodeId add_node();
  std::size_t node_count() const noexcept { return node_count_; }

  InfluenceNetwork build() &&;

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
};

enum class EdgeStatus : std::uint8_t { Zero, One, Star };

/// Partial determination of every edge: absent, present, or still to be sampled.
class StatusAssignment {
 public:
  explicit StatusAssignment(std::size_t edge_count = 0)
      : status_(edge_count, EdgeStatus::Star) {}

  EdgeStatus operator[](EdgeId e) const { return status_[e]; }
  void set(EdgeId e, EdgeStatus s) {
    determined_ += static_cast<std::ptrdiff_t>(s != EdgeStatus::Star) -
                   static_cast<std::ptrdiff_t>(status_[e] != EdgeStatus::Star);
    status_[e] = s;
  }

  std::size_t size() const noexcept { return status_.size(); }
  std::size_t determined_count() const noexcept { return determined_; }
  std::size_t undetermined_count() const noexcept { return status_.size() - determined_; }
  std::span<const EdgeStatus> statuses() const noexcept { return status_; }

 private:
  std::vector<EdgeStatus> status_;
  std::size_t determined_ = 0;
};

/// One fully determined realization of a network.
class PossibleGraph {
 public:
  // Throws InputError if present.size() != net.edge_count().
  PossibleGraph(const InfluenceNetwork& net, std::vector<std::uint8_t> present);

  const InfluenceNetwork& network() const noexcept { return *net_; }
  bool present(EdgeId e) const { return present_[e] != 0; }
  std::span<const std::uint8_t> present_mask() const noexcept { return present_; }
  bool belongs_to(const InfluenceNetwork& net) const noexcept { return net_ == &net; }

 private:
  const InfluenceNetwork* net_;
  std::vector<std::uint8_t> present_;
};

double possible_graph_prob(const InfluenceNetwork& net, const PossibleGraph& g);

// Number of nodes other than s reachable from s over present edges.
std::size_t reach_count(const PossibleGraph& g, NodeId s);

PossibleGraph sample_possible_graph(const InfluenceNetwork& net, const StatusAssignment& assign,
                                    Rng& rng);

// Edges in the order a FIFO breadth-first traversal from s first examines them,
// followed by the never-examined edges in ascending id order.
std::vector<EdgeId> bfs_edge_order(const InfluenceNetwork& net, NodeId s);

struct VirtualSeed {
  InfluenceNetwork network;
  NodeId seed;
};

// Appends a node wired to every seed by a probability-1 edge. Reachability
// from the new node counts the seeds themselves.
VirtualSeed add_virtual_seed(const InfluenceNetwork& net, std::span<const NodeId> seeds);

/// Reusable scratch space for computing f_s on many worlds without
/// materializing a PossibleGraph each time.
/// Splits each 64-bit draw into two 32-bit words.
class HalfWords {
 public:
  explicit HalfWords(Rng& rng) : rng_(&rng) {}
  std::uint32_t next() {
    if (spare_) {
      spare_ = false;
      return static_cast<std::uint32_t>(buf_ >> 32);
    }
    buf_ = (*rng_)();
    spare_ = true;
    return static_cast<std::uint32_t>(buf_);
  }

 private:
  Rng* rng_;
  std::uint64_t buf_ = 0;
  bool spare_ = false;
};

class ReachSampler {
 public:
  explicit ReachSampler(const InfluenceNetwork& net);

  // f_s of one world drawn conditional on `assign`. Eager mode flips every
  // undetermined edge first; lazy mode flips only edges the traversal examines.
  // Coins use 32-bit halves of the stream's draws.
  std::size_t sample(const StatusAssignment& assign, NodeId s, Rng& rng, bool lazy = false);

  // f_s of the world fixed by `assign`; Star entries are treated as absent.
  std::size_t count_determined(const StatusAssignment& assign, NodeId s);

 private:
  template <class Present>
  std::size_t traverse(NodeId s, Present&& present);

  const InfluenceNetwork* net_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> queue_;
  std::vector<std::uint8_t> present_;
};

}  // namespace stratinf
