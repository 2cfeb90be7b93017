#include "macosim/net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "json.hpp"
#include "macosim/rng.hpp"

namespace macosim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown key \"" + it.key() + "\" in " + where);
  }
}

LengthMm meters_to_mm(double m) { return std::llround(m * 1000.0); }

}  // namespace

RoadNetwork::RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const int n = static_cast<int>(nodes_.size());
  const int m = static_cast<int>(edges_.size());
  if (n == 0) fail("network has no nodes");

  // Node ids must be dense 0..n-1.
  std::vector<bool> seen(n, false);
  for (const RoadNode& nd : nodes_) {
    if (nd.id < 0 || nd.id >= n)
      fail("node id " + std::to_string(nd.id) + " out of dense range 0.." +
           std::to_string(n - 1));
    if (seen[nd.id]) fail("duplicate node id " + std::to_string(nd.id));
    seen[nd.id] = true;
  }
  std::sort(nodes_.begin(), nodes_.end(),
            [](const RoadNode& a, const RoadNode& b) { return a.id < b.id; });

  std::vector<bool> eseen(m, false);
  out_.assign(n, {});
  in_.assign(n, {});
  for (const RoadEdge& e : edges_) {
    if (e.id < 0 || e.id >= m)
      fail("edge id " + std::to_string(e.id) + " out of dense range 0.." +
           std::to_string(m - 1));
    if (eseen[e.id]) fail("duplicate edge id " + std::to_string(e.id));
    eseen[e.id] = true;
    if (e.from < 0 || e.from >= n)
      fail("edge " + std::to_string(e.id) + " references missing node " +
           std::to_string(e.from));
    if (e.to < 0 || e.to >= n)
      fail("edge " + std::to_string(e.id) + " references missing node " +
           std::to_string(e.to));
    if (e.from == e.to)
      fail("edge " + std::to_string(e.id) + " is a self-loop at node " +
           std::to_string(e.from));
    if (e.length_mm <= 0)
      fail("edge " + std::to_string(e.id) + " has nonpositive length");
    if (e.lanes < 1)
      fail("edge " + std::to_string(e.id) + " has lanes < 1");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const RoadEdge& a, const RoadEdge& b) { return a.id < b.id; });

  for (const RoadEdge& e : edges_) {
    out_[e.from].push_back({e.to, e.id});
    in_[e.to].push_back(e.id);
  }
  for (int u = 0; u < n; ++u) {
    auto& lst = out_[u];
    std::sort(lst.begin(), lst.end(), [](const OutEdge& a, const OutEdge& b) {
      return a.neighbor < b.neighbor;
    });
    for (std::size_t i = 1; i < lst.size(); ++i) {
      if (lst[i].neighbor == lst[i - 1].neighbor)
        fail("duplicate edge between nodes " + std::to_string(u) + " and " +
             std::to_string(lst[i].neighbor));
    }
    std::sort(in_[u].begin(), in_[u].end());
  }
}

std::optional<EdgeId> RoadNetwork::edge_between(NodeId from, NodeId to) const {
  for (const OutEdge& oe : out_edges(from)) {
    if (oe.neighbor == to) return oe.edge;
    if (oe.neighbor > to) break;
  }
  return std::nullopt;
}

DistanceTable::DistanceTable(int n, std::vector<LengthMm> dist,
                             std::vector<NodeId> next)
    : n_(n), dist_(std::move(dist)), next_(std::move(next)) {}

RoadNetwork load_network(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("network parse error: ") + e.what());
  }
  if (!doc.is_object()) fail("network document must be a JSON object");
  reject_unknown_keys(doc, {"nodes", "edges"}, "network document");
  if (!doc.contains("nodes") || !doc.contains("edges"))
    fail("network document requires \"nodes\" and \"edges\"");

  std::vector<RoadNode> nodes;
  for (const json& jn : doc["nodes"]) {
    if (!jn.is_object()) fail("node entries must be objects");
    reject_unknown_keys(jn, {"id", "signalized", "x", "y"}, "node entry");
    RoadNode nd;
    if (!jn.contains("id") || !jn["id"].is_number_integer())
      fail("node entry missing integer \"id\"");
    nd.id = jn["id"].get<NodeId>();
    if (!jn.contains("signalized") || !jn["signalized"].is_boolean())
      fail("node " + std::to_string(nd.id) + " missing boolean \"signalized\"");
    nd.signalized = jn["signalized"].get<bool>();
    if (jn.contains("x") != jn.contains("y"))
      fail("node " + std::to_string(nd.id) + " must give both x and y or neither");
    if (jn.contains("x")) {
      nd.has_position = true;
      nd.x_m = jn["x"].get<double>();
      nd.y_m = jn["y"].get<double>();
    }
    nodes.push_back(nd);
  }

  std::vector<RoadEdge> edges;
  for (const json& je : doc["edges"]) {
    if (!je.is_object()) fail("edge entries must be objects");
    reject_unknown_keys(je, {"id", "from", "to", "length_m", "lanes"},
                        "edge entry");
    RoadEdge e;
    for (const char* k : {"id", "from", "to", "length_m", "lanes"}) {
      if (!je.contains(k))
        fail("edge entry missing \"" + std::string(k) + "\"");
    }
    e.id = je["id"].get<EdgeId>();
    e.from = je["from"].get<NodeId>();
    e.to = je["to"].get<NodeId>();
    if (!je["length_m"].is_number()) fail("edge " + std::to_string(e.id) + " length_m must be a number");
    e.length_mm = meters_to_mm(je["length_m"].get<double>());
    if (!je["lanes"].is_number_integer())
      fail("edge " + std::to_string(e.id) + " lanes must be an integer");
    e.lanes = je["lanes"].get<int>();
    edges.push_back(e);
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

RoadNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open network file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

std::string serialize_network(const RoadNetwork& net) {
  json doc;
  doc["nodes"] = json::array();
  for (const RoadNode& nd : net.nodes()) {
    json jn;
    jn["id"] = nd.id;
    jn["signalized"] = nd.signalized;
    if (nd.has_position) {
      jn["x"] = nd.x_m;
      jn["y"] = nd.y_m;
    }
    doc["nodes"].push_back(jn);
  }
  doc["edges"] = json::array();
  for (const RoadEdge& e : net.edges()) {
    json je;
    je["id"] = e.id;
    je["from"] = e.from;
    je["to"] = e.to;
    je["length_m"] = static_cast<double>(e.length_mm) / 1000.0;
    je["lanes"] = e.lanes;
    doc["edges"].push_back(je);
  }
  return doc.dump(2);
}

void write_network_file(const RoadNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write network file: " + path);
  out << serialize_network(net) << "\n";
}

RoadNetwork generate_grid(int rows, int cols, double edge_length_m, int lanes,
                          bool signalized_interior, std::uint64_t /*seed*/) {
  if (rows < 2 || cols < 2) fail("grid needs rows >= 2 and cols >= 2");
  if (edge_length_m <= 0) fail("grid edge length must be positive");
  if (lanes < 1) fail("grid lanes must be >= 1");

  std::vector<RoadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      RoadNode nd;
      nd.id = r * cols + c;
      bool interior = r > 0 && r < rows - 1 && c > 0 && c < cols - 1;
      nd.signalized = signalized_interior && interior;
      nd.has_position = true;
      nd.x_m = c * edge_length_m;
      nd.y_m = r * edge_length_m;
      nodes.push_back(nd);
    }
  }

  const LengthMm len = meters_to_mm(edge_length_m);
  std::vector<RoadEdge> edges;
  EdgeId next_id = 0;
  auto add_pair = [&](NodeId a, NodeId b) {
    edges.push_back({next_id++, a, b, len, lanes});
    edges.push_back({next_id++, b, a, len, lanes});
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      NodeId here = r * cols + c;
      if (c + 1 < cols) add_pair(here, here + 1);
      if (r + 1 < rows) add_pair(here, here + cols);
    }
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

RoadNetwork generate_city(int node_count, int undirected_links, int lanes,
                          std::uint64_t seed) {
  if (node_count < 2) fail("city needs at least 2 nodes");
  if (undirected_links < node_count - 1)
    fail("city needs at least nodes-1 undirected links to be connected");
  if (lanes < 1) fail("city lanes must be >= 1");

  // Seeded points in a 6 x 4 km box, kept apart by rejection sampling so
  // edge lengths stay road-like.
  const double width_m = 6000.0, height_m = 4000.0;
  const double min_gap_m = 350.0;
  std::vector<double> xs(node_count), ys(node_count);
  std::uint64_t counter = 0;
  for (int i = 0; i < node_count; ++i) {
    for (;;) {
      double x = rng::uniform(rng::draw(seed, rng::Stream::NetGen, counter, 0),
                              0.0, width_m);
      double y = rng::uniform(rng::draw(seed, rng::Stream::NetGen, counter, 1),
                              0.0, height_m);
      ++counter;
      bool ok = true;
      for (int j = 0; j < i; ++j) {
        double dx = xs[j] - x, dy = ys[j] - y;
        if (dx * dx + dy * dy < min_gap_m * min_gap_m) {
          ok = false;
          break;
        }
      }
      if (ok || counter > 100000) {
        xs[i] = x;
        ys[i] = y;
        break;
      }
    }
  }

  auto dist_m = [&](int a, int b) {
    double dx = xs[a] - xs[b], dy = ys[a] - ys[b];
    return std::sqrt(dx * dx + dy * dy);
  };

  // Euclidean spanning tree (Prim), then the shortest remaining pairs.
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> in_tree(node_count, false);
  std::vector<double> best(node_count, std::numeric_limits<double>::max());
  std::vector<int> best_from(node_count, 0);
  in_tree[0] = true;
  for (int j = 1; j < node_count; ++j) {
    best[j] = dist_m(0, j);
    best_from[j] = 0;
  }
  for (int it = 1; it < node_count; ++it) {
    int pick = -1;
    for (int j = 0; j < node_count; ++j) {
      if (!in_tree[j] && (pick == -1 || best[j] < best[pick])) pick = j;
    }
    in_tree[pick] = true;
    pairs.emplace_back(std::min(best_from[pick], pick),
                       std::max(best_from[pick], pick));
    for (int j = 0; j < node_count; ++j) {
      if (!in_tree[j] && dist_m(pick, j) < best[j]) {
        best[j] = dist_m(pick, j);
        best_from[j] = pick;
      }
    }
  }

  auto has_pair = [&](int a, int b) {
    return std::find(pairs.begin(), pairs.end(),
                     std::make_pair(std::min(a, b), std::max(a, b))) !=
           pairs.end();
  };
  std::vector<std::tuple<double, int, int>> rest;
  for (int a = 0; a < node_count; ++a)
    for (int b = a + 1; b < node_count; ++b)
      if (!has_pair(a, b)) rest.emplace_back(dist_m(a, b), a, b);
  std::sort(rest.begin(), rest.end());
  for (const auto& [d, a, b] : rest) {
    if (static_cast<int>(pairs.size()) >= undirected_links) break;
    pairs.emplace_back(a, b);
  }
  if (static_cast<int>(pairs.size()) != undirected_links)
    fail("city generator could not place the requested link count");

  std::vector<int> degree(node_count, 0);
  for (const auto& [a, b] : pairs) {
    ++degree[a];
    ++degree[b];
  }

  std::vector<RoadNode> nodes;
  for (int i = 0; i < node_count; ++i) {
    RoadNode nd;
    nd.id = i;
    nd.signalized = degree[i] >= 3;
    nd.has_position = true;
    nd.x_m = std::round(xs[i]);
    nd.y_m = std::round(ys[i]);
    nodes.push_back(nd);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<RoadEdge> edges;
  EdgeId next_id = 0;
  for (const auto& [a, b] : pairs) {
    LengthMm len = std::max<LengthMm>(1000, meters_to_mm(std::round(dist_m(a, b))));
    edges.push_back({next_id++, a, b, len, lanes});
    edges.push_back({next_id++, b, a, len, lanes});
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

namespace {

// Distance from every node to `dst` over reversed edges.
std::vector<LengthMm> dijkstra_to(const RoadNetwork& net, NodeId dst) {
  const int n = net.node_count();
  std::vector<std::vector<OutEdge>> rev(n);
  for (const RoadEdge& e : net.edges()) rev[e.to].push_back({e.from, e.id});

  std::vector<LengthMm> dist(n, kUnreachableMm);
  using Item = std::pair<LengthMm, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[dst] = 0;
  heap.emplace(0, dst);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[u]) continue;
    for (const OutEdge& oe : rev[u]) {
      LengthMm nd = d + net.edge(oe.edge).length_mm;
      if (nd < dist[oe.neighbor]) {
        dist[oe.neighbor] = nd;
        heap.emplace(nd, oe.neighbor);
      }
    }
  }
  return dist;
}

// Smallest out-neighbor that lies on a shortest path toward dst. Walking
// this greedily yields the lexicographically smallest shortest path.
NodeId greedy_hop(const RoadNetwork& net, std::span<const LengthMm> dist_to,
                  NodeId u) {
  for (const OutEdge& oe : net.out_edges(u)) {  // neighbor order = ascending id
    if (dist_to[oe.neighbor] == kUnreachableMm) continue;
    if (net.edge(oe.edge).length_mm + dist_to[oe.neighbor] == dist_to[u])
      return oe.neighbor;
  }
  return kNoNode;
}

}  // namespace

std::optional<PathResult> shortest_path(const RoadNetwork& net, NodeId src,
                                        NodeId dst) {
  if (!net.valid_node(src) || !net.valid_node(dst))
    fail("shortest_path: invalid node id");
  if (src == dst) return PathResult{{src}, 0};

  std::vector<LengthMm> dist_to = dijkstra_to(net, dst);
  if (dist_to[src] == kUnreachableMm) return std::nullopt;

  PathResult out;
  out.distance_mm = dist_to[src];
  out.path.push_back(src);
  NodeId u = src;
  while (u != dst) {
    u = greedy_hop(net, dist_to, u);
    out.path.push_back(u);
  }
  return out;
}

DistanceTable all_pairs_distances(const RoadNetwork& net) {
  const int n = net.node_count();
  std::vector<LengthMm> dist(static_cast<std::size_t>(n) * n, kUnreachableMm);
  std::vector<NodeId> next(static_cast<std::size_t>(n) * n, kNoNode);

  for (NodeId dst = 0; dst < n; ++dst) {
    std::vector<LengthMm> dist_to = dijkstra_to(net, dst);
    for (NodeId u = 0; u < n; ++u) {
      dist[static_cast<std::size_t>(u) * n + dst] = dist_to[u];
      if (u == dst) {
        next[static_cast<std::size_t>(u) * n + dst] = u;
      } else if (dist_to[u] != kUnreachableMm) {
        next[static_cast<std::size_t>(u) * n + dst] =
            greedy_hop(net, dist_to, u);
      }
    }
  }
  return DistanceTable(n, std::move(dist), std::move(next));
}

std::vector<OutEdge> adjacent_neighbors(const RoadNetwork& net, NodeId node) {
  if (!net.valid_node(node)) fail("adjacent_neighbors: invalid node id");
  auto span = net.out_edges(node);
  return {span.begin(), span.end()};
}

}  // namespace macosim
