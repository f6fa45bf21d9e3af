#include "stratinf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stratinf/errors.hpp"

namespace stratinf {

namespace {

std::uint64_t half_threshold(double p) {
  if (p >= 1.0) return std::uint64_t{1} << 32;
  if (p <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(p, 32));
}

std::uint64_t coin_threshold(double p) {
  if (p >= 1.0) return UINT64_MAX;
  if (p <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

void require_node(const InfluenceNetwork& net, NodeId s) {
  if (!net.contains(s)) {
    throw InputError("node id " + std::to_string(s) + " out of range (n = " +
                     std::to_string(net.node_count()) + ")");
  }
}

}  // namespace

InfluenceNetwork::InfluenceNetwork(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  std::vector<std::size_t> degree(node_count_ + 1, 0);
  coin_cut_.reserve(edges_.size());
  half_cut_.reserve(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.id != i) throw InputError("edge ids must be dense and ordered");
    if (e.src >= node_count_ || e.dst >= node_count_) {
      throw InputError("edge " + std::to_string(i) + " has an endpoint out of range");
    }
    if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
      throw InputError("edge " + std::to_string(i) + " has probability outside [0, 1]");
    }
    if (e.src == e.dst) ++self_loops_;
    ++degree[e.src + 1];
    coin_cut_.push_back(coin_threshold(e.prob));
    half_cut_.push_back(half_threshold(e.prob));
  }
  out_offsets_.assign(node_count_ + 1, 0);
  for (std::size_t v = 0; v < node_count_; ++v) out_offsets_[v + 1] = out_offsets_[v] + degree[v + 1];
  out_edges_.resize(edges_.size());
  std::vector<std::size_t> fill(out_offsets_.begin(), out_offsets_.end() - 1);
  out_dst_.resize(edges_.size());
  for (const Edge& e : edges_) {
    out_dst_[fill[e.src]] = e.dst;
    out_edges_[fill[e.src]++] = e.id;
  }
}

EdgeId NetworkBuilder::add_edge(NodeId src, NodeId dst, double prob) {
  const auto id = static_cast<EdgeId>(edges_.size());
  edges_.push_back({id, src, dst, prob});
  return id;
}

NodeId NetworkBuilder::add_node() { return static_cast<NodeId>(node_count_++); }

InfluenceNetwork NetworkBuilder::build() && {
  return InfluenceNetwork(node_count_, std::move(edges_));
}

PossibleGraph::PossibleGraph(const InfluenceNetwork& net, std::vector<std::uint8_t> present)
    : net_(&net), present_(std::move(present)) {
  if (present_.size() != net.edge_count()) {
    throw InputError("possible graph has " + std::to_string(present_.size()) +
                     " edge flags, network has " + std::to_string(net.edge_count()));
  }
}

double possible_graph_prob(const InfluenceNetwork& net, const PossibleGraph& g) {
  if (!g.belongs_to(net)) throw InputError("possible graph drawn from a different network");
  double pr = 1.0;
  for (const Edge& e : net.edges()) pr *= g.present(e.id) ? e.prob : 1.0 - e.prob;
  return pr;
}

std::size_t reach_count(const PossibleGraph& g, NodeId s) {
  const InfluenceNetwork& net = g.network();
  require_node(net, s);
  std::vector<std::uint8_t> seen(net.node_count(), 0);
  std::vector<NodeId> queue{s};
  seen[s] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (EdgeId e : net.out_edges(queue[head])) {
      const NodeId v = net.edge(e).dst;
      if (g.present(e) && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return queue.size() - 1;
}

PossibleGraph sample_possible_graph(const InfluenceNetwork& net, const StatusAssignment& assign,
                                    Rng& rng) {
  if (assign.size() != net.edge_count()) throw InputError("assignment size mismatch");
  std::vector<std::uint8_t> present(net.edge_count());
  for (EdgeId e = 0; e < present.size(); ++e) {
    switch (assign[e]) {
      case EdgeStatus::Zero: present[e] = 0; break;
      case EdgeStatus::One: present[e] = 1; break;
      case EdgeStatus::Star: present[e] = net.flip(e, rng) ? 1 : 0; break;
    }
  }
  return PossibleGraph(net, std::move(present));
}

std::vector<EdgeId> bfs_edge_order(const InfluenceNetwork& net, NodeId s) {
  require_node(net, s);
  std::vector<EdgeId> order;
  order.reserve(net.edge_count());
  std::vector<std::uint8_t> seen(net.node_count(), 0);
  std::vector<std::uint8_t> listed(net.edge_count(), 0);
  std::vector<NodeId> queue{s};
  seen[s] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (EdgeId e : net.out_edges(queue[head])) {
      order.push_back(e);
      listed[e] = 1;
      const NodeId v = net.edge(e).dst;
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    if (!listed[e]) order.push_back(e);
  }
  return order;
}

VirtualSeed add_virtual_seed(const InfluenceNetwork& net, std::span<const NodeId> seeds) {
  if (seeds.empty()) throw InputError("seed set is empty");
  for (NodeId v : seeds) require_node(net, v);
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  const auto hub = static_cast<NodeId>(net.node_count());
  for (NodeId v : seeds) {
    edges.push_back({static_cast<EdgeId>(edges.size()), hub, v, 1.0});
  }
  return {InfluenceNetwork(net.node_count() + 1, std::move(edges)), hub};
}

ReachSampler::ReachSampler(const InfluenceNetwork& net)
    : net_(&net), stamp_(net.node_count(), 0), present_(net.edge_count(), 0) {
  queue_.reserve(net.node_count());
}

template <class Present>
std::size_t ReachSampler::traverse(NodeId s, Present&& present) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  const std::uint32_t mark = epoch_;
  queue_.clear();
  queue_.push_back(s);
  stamp_[s] = mark;
  const auto adj = net_->adjacency_edges();
  const auto dst = net_->adjacency_targets();
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const NodeId u = queue_[head];
    const std::size_t end = net_->out_offset(u + 1);
    for (std::size_t pos = net_->out_offset(u); pos < end; ++pos) {
      const NodeId v = dst[pos];
      // The coin is evaluated even when v is already reached so that lazy
      // mode consumes one draw per examined undetermined edge.
      if (present(pos, adj[pos]) && stamp_[v] != mark) {
        stamp_[v] = mark;
        queue_.push_back(v);
      }
    }
  }
  return queue_.size() - 1;
}

std::size_t ReachSampler::sample(const StatusAssignment& assign, NodeId s, Rng& rng, bool lazy) {
  const auto status = assign.statuses();
  HalfWords words(rng);
  if (lazy) {
    return traverse(s, [&](std::size_t, EdgeId e) {
      const EdgeStatus st = status[e];
      return st == EdgeStatus::Star ? words.next() < net_->half_cut(e) : st == EdgeStatus::One;
    });
  }
  // Coins are stored by adjacency position so the traversal reads them in order.
  const auto adj = net_->adjacency_edges();
  if (assign.determined_count() == 0) {
    for (std::size_t pos = 0; pos < adj.size(); ++pos) {
      present_[pos] = words.next() < net_->half_cut(adj[pos]);
    }
  } else {
    for (std::size_t pos = 0; pos < adj.size(); ++pos) {
      const EdgeId e = adj[pos];
      const EdgeStatus st = status[e];
      present_[pos] = st == EdgeStatus::Star ? words.next() < net_->half_cut(e)
                                             : st == EdgeStatus::One;
    }
  }
  return traverse(s, [&](std::size_t pos, EdgeId) { return present_[pos] != 0; });
}

std::size_t ReachSampler::count_determined(const StatusAssignment& assign, NodeId s) {
  const auto status = assign.statuses();
  return traverse(s, [&](std::size_t, EdgeId e) { return status[e] == EdgeStatus::One; });
}

}  // namespace stratinf
