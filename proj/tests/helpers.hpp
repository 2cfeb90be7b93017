#pragma once

// Shared test utilities: small random graphs and an independent
// Floyd-Warshall oracle for shortest-path checks.

#include <cstdint>
#include <vector>

#include "macosim/net.hpp"
#include "macosim/rng.hpp"

namespace testutil {

using macosim::kUnreachableMm;
using macosim::LengthMm;
using macosim::NodeId;
using macosim::RoadEdge;
using macosim::RoadNetwork;
using macosim::RoadNode;

// Random directed graph: n <= 12 nodes, integer lengths 1..20 meters, each
// ordered pair present with probability ~0.3.
inline RoadNetwork random_digraph(std::uint64_t seed) {
  const int n = 2 + static_cast<int>(macosim::rng::below(
                        macosim::rng::draw(seed, 900), 11));
  std::vector<RoadNode> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = RoadNode{i, false, false, 0, 0};

  std::vector<RoadEdge> edges;
  std::uint64_t c = 0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      ++c;
      if (macosim::rng::to_unit(macosim::rng::draw(seed, 901, c)) >= 0.3) continue;
      auto meters = 1 + static_cast<LengthMm>(macosim::rng::below(
                            macosim::rng::draw(seed, 902, c), 20));
      edges.push_back(RoadEdge{static_cast<macosim::EdgeId>(edges.size()), u, v,
                               meters * 1000, 1});
    }
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

// Brute-force all-pairs oracle.
inline std::vector<LengthMm> floyd_warshall(const RoadNetwork& net) {
  const int n = net.node_count();
  std::vector<LengthMm> d(static_cast<std::size_t>(n) * n, kUnreachableMm);
  for (int u = 0; u < n; ++u) d[static_cast<std::size_t>(u) * n + u] = 0;
  for (const RoadEdge& e : net.edges()) {
    auto& cell = d[static_cast<std::size_t>(e.from) * n + e.to];
    cell = std::min(cell, e.length_mm);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        LengthMm ik = d[static_cast<std::size_t>(i) * n + k];
        LengthMm kj = d[static_cast<std::size_t>(k) * n + j];
        if (ik == kUnreachableMm || kj == kUnreachableMm) continue;
        auto& cell = d[static_cast<std::size_t>(i) * n + j];
        cell = std::min(cell, ik + kj);
      }
  return d;
}

// Lexicographically smallest shortest path computed greedily over the
// Floyd-Warshall matrix; independent of the library's Dijkstra route.
inline std::vector<NodeId> fw_lexi_path(const RoadNetwork& net,
                                        const std::vector<LengthMm>& fw,
                                        NodeId src, NodeId dst) {
  const int n = net.node_count();
  std::vector<NodeId> path{src};
  NodeId u = src;
  while (u != dst) {
    NodeId pick = macosim::kNoNode;
    for (const macosim::OutEdge& oe : net.out_edges(u)) {
      LengthMm rest = fw[static_cast<std::size_t>(oe.neighbor) * n + dst];
      if (rest == kUnreachableMm) continue;
      if (net.edge(oe.edge).length_mm + rest ==
          fw[static_cast<std::size_t>(u) * n + dst]) {
        pick = oe.neighbor;
        break;  // out_edges ascend by neighbor id
      }
    }
    if (pick == macosim::kNoNode) return {};
    path.push_back(pick);
    u = pick;
  }
  return path;
}

}  // namespace testutil
