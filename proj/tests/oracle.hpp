#pragma once
// Reference computations used by the tests. Deliberately independent of the
// library's traversal code: reachability is a boolean transitive closure over
// an adjacency matrix, and world probabilities are plain products.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "stratinf/graph.hpp"

namespace oracle {

struct Arc {
  std::uint32_t src;
  std::uint32_t dst;
  double p;
};

// Nodes other than s reachable from s in the world where arc j is present iff
// bit j of mask is set.
inline int reach_in_world(std::size_t n, const std::vector<Arc>& arcs, std::uint64_t mask,
                          std::uint32_t s) {
  std::vector<std::vector<char>> c(n, std::vector<char>(n, 0));
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    if ((mask >> j) & 1U) c[arcs[j].src][arcs[j].dst] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (c[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (c[k][j]) c[i][j] = 1;
  int count = 0;
  for (std::size_t v = 0; v < n; ++v) count += (v != s && c[s][v]) ? 1 : 0;
  return count;
}

inline double world_prob(const std::vector<Arc>& arcs, std::uint64_t mask) {
  double pr = 1.0;
  for (std::size_t j = 0; j < arcs.size(); ++j) pr *= ((mask >> j) & 1U) ? arcs[j].p : 1.0 - arcs[j].p;
  return pr;
}

// Expected reach by enumerating every world.
inline double expected_reach(std::size_t n, const std::vector<Arc>& arcs, std::uint32_t s) {
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << arcs.size()); ++mask) {
    total += world_prob(arcs, mask) * reach_in_world(n, arcs, mask, s);
  }
  return total;
}

// Expected number of nodes reachable from any member of `seeds`, the seeds
// themselves included.
inline double expected_set_reach(std::size_t n, const std::vector<Arc>& arcs,
                                 const std::vector<std::uint32_t>& seeds) {
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << arcs.size()); ++mask) {
    std::vector<char> hit(n, 0);
    for (auto s : seeds) {
      hit[s] = 1;
      std::vector<std::uint32_t> stack{s};
      std::vector<char> seen(n, 0);
      seen[s] = 1;
      while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < arcs.size(); ++j) {
          if (((mask >> j) & 1U) && arcs[j].src == u && !seen[arcs[j].dst]) {
            seen[arcs[j].dst] = hit[arcs[j].dst] = 1;
            stack.push_back(arcs[j].dst);
          }
        }
      }
    }
    int count = 0;
    for (char h : hit) count += h;
    total += world_prob(arcs, mask) * count;
  }
  return total;
}

inline stratinf::InfluenceNetwork build(std::size_t n, const std::vector<Arc>& arcs) {
  std::vector<stratinf::Edge> edges;
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    edges.push_back({static_cast<stratinf::EdgeId>(j), arcs[j].src, arcs[j].dst, arcs[j].p});
  }
  return stratinf::InfluenceNetwork(n, std::move(edges));
}

// Random small instance: n nodes, m arcs drawn with replacement (parallel
// arcs and self-loops allowed), probabilities uniform with some 0/1 mixed in.
inline std::vector<Arc> random_arcs(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                    bool degenerate = false) {
  std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Arc> arcs;
  for (std::size_t j = 0; j < m; ++j) {
    double p = unit(rng);
    if (degenerate) {
      const double u = unit(rng);
      if (u < 0.1) p = 0.0;
      if (u > 0.9) p = 1.0;
    }
    arcs.push_back({node(rng), node(rng), p});
  }
  return arcs;
}

// The 10-edge, 6-node example network with nodes v1..v6 as ids 0..5. Arcs
// are listed per source so that each node's out-list keeps this order.
inline std::vector<Arc> six_node_example(double p = 0.5) {
  return {{0, 1, p}, {0, 2, p}, {0, 3, p}, {1, 5, p}, {2, 0, p},
          {2, 3, p}, {3, 5, p}, {4, 2, p}, {4, 5, p}, {5, 1, p}};
}

}  // namespace oracle
