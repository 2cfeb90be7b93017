#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace macosim {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

// Edge lengths are stored as integer millimeters so shortest-path ties and
// distance equality are exact.
using LengthMm = std::int64_t;

inline constexpr LengthMm kUnreachableMm = std::numeric_limits<LengthMm>::max();
inline constexpr NodeId kNoNode = -1;
inline constexpr EdgeId kNoEdge = -1;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoadNode {
  NodeId id = kNoNode;
  bool signalized = false;
  bool has_position = false;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct RoadEdge {
  EdgeId id = kNoEdge;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  LengthMm length_mm = 0;
  int lanes = 1;
};

struct OutEdge {
  NodeId neighbor = kNoNode;
  EdgeId edge = kNoEdge;
};

// Directed road graph. Two-way streets are two directed edges. Immutable
// after construction; safe to share across threads.
class RoadNetwork {
 public:
  RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const RoadNode& node(NodeId id) const { return nodes_.at(id); }
  const RoadEdge& edge(EdgeId id) const { return edges_.at(id); }
  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }

  // Out-edges of a node, sorted by neighbor id.
  std::span<const OutEdge> out_edges(NodeId id) const {
    return {out_[id].data(), out_[id].size()};
  }
  // Incoming edge ids of a node, ascending.
  std::span<const EdgeId> in_edges(NodeId id) const {
    return {in_[id].data(), in_[id].size()};
  }

  bool valid_node(NodeId id) const { return id >= 0 && id < node_count(); }
  std::optional<EdgeId> edge_between(NodeId from, NodeId to) const;

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<OutEdge>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

// All-pairs shortest distances plus a next-hop matrix consistent with the
// lexicographically-smallest shortest path between every reachable pair.
class DistanceTable {
 public:
  DistanceTable(int n, std::vector<LengthMm> dist, std::vector<NodeId> next);

  int size() const { return n_; }
  LengthMm dist_mm(NodeId u, NodeId v) const { return dist_[idx(u, v)]; }
  NodeId next_hop(NodeId u, NodeId v) const { return next_[idx(u, v)]; }
  bool reachable(NodeId u, NodeId v) const {
    return dist_[idx(u, v)] != kUnreachableMm;
  }

 private:
  std::size_t idx(NodeId u, NodeId v) const {
    return static_cast<std::size_t>(u) * n_ + v;
  }
  int n_;
  std::vector<LengthMm> dist_;
  std::vector<NodeId> next_;
};

struct PathResult {
  std::vector<NodeId> path;
  LengthMm distance_mm = 0;
};

// Network JSON schema (strict; unknown keys rejected):
//   {"nodes": [{"id": int, "signalized": bool, "x": number?, "y": number?}],
//    "edges": [{"id": int, "from": int, "to": int,
//               "length_m": number, "lanes": int}]}
RoadNetwork load_network(const std::string& json_text);
RoadNetwork load_network_file(const std::string& path);
std::string serialize_network(const RoadNetwork& net);
void write_network_file(const RoadNetwork& net, const std::string& path);

// rows*cols nodes on a lattice, bidirectional edges between 4-neighbors,
// interior nodes signalized when requested. Deterministic in its arguments
// (the seed is accepted for interface symmetry with the other generators).
RoadNetwork generate_grid(int rows, int cols, double edge_length_m, int lanes,
                          bool signalized_interior, std::uint64_t seed);

// Random geometric city: `nodes` points in a box, Euclidean spanning tree
// plus the shortest remaining links until `undirected_links` pairs exist,
// every pair materialized as two directed edges. Nodes of degree >= 3 are
// signalized. Pure function of its arguments.
RoadNetwork generate_city(int nodes, int undirected_links, int lanes,
                          std::uint64_t seed);

// The bundled 52-node / 128-directed-edge network (assets/delhi52.json) is
// generate_city(52, 64, 3, kCitySeed) checked in at generation time.
inline constexpr std::uint64_t kCitySeed = 20250810;

// Lexicographically-smallest shortest path; nullopt when dst is unreachable.
std::optional<PathResult> shortest_path(const RoadNetwork& net, NodeId src,
                                        NodeId dst);

DistanceTable all_pairs_distances(const RoadNetwork& net);

// Exactly the out-edges of `node`, sorted by neighbor id.
std::vector<OutEdge> adjacent_neighbors(const RoadNetwork& net, NodeId node);

}  // namespace macosim
