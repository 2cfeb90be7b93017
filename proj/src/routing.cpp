#include "macosim/routing.hpp"

#include <cmath>

#include "macosim/rng.hpp"

namespace macosim {

void RoutingParams::validate() const {
  if (deviation_threshold < 0)
    throw ValidationError("routing deviation_threshold must be >= 0");
  if (aco_alpha < 0 || aco_beta < 0)
    throw ValidationError("routing aco exponents must be >= 0");
}

std::vector<OutEdge> candidate_neighbors(NodeId current, NodeId dest,
                                         const RoadNetwork& net,
                                         const DistanceTable& dist,
                                         bool progress_filter) {
  std::vector<OutEdge> reachable;
  std::vector<OutEdge> closer;
  for (const OutEdge& oe : net.out_edges(current)) {
    if (!dist.reachable(oe.neighbor, dest)) continue;
    reachable.push_back(oe);
    if (dist.dist_mm(oe.neighbor, dest) < dist.dist_mm(current, dest))
      closer.push_back(oe);
  }
  if (progress_filter && !closer.empty()) return closer;
  return reachable;
}

std::optional<RouteDecision> next_node_maco(NodeId current, NodeId dest,
                                            const RoadNetwork& net,
                                            const PheromoneField& field,
                                            const DistanceTable& dist,
                                            const RoutingParams& params,
                                            std::int64_t n_t,
                                            std::span<const std::int32_t> edge_occupancy) {
  auto candidates =
      candidate_neighbors(current, dest, net, dist, params.progress_filter);
  if (candidates.empty()) return std::nullopt;

  // Candidates come sorted by neighbor id, so a strict < keeps the lowest
  // neighbor on pheromone ties.
  std::size_t primary = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (field.level(candidates[i].edge) < field.level(candidates[primary].edge))
      primary = i;
  }

  bool trigger = false;
  if (candidates.size() >= 2) {
    if (params.deviation_mode == DeviationMode::Global) {
      trigger = n_t > params.deviation_threshold;
    } else {
      EdgeId pe = candidates[primary].edge;
      std::int64_t occ = pe < static_cast<EdgeId>(edge_occupancy.size())
                             ? edge_occupancy[pe]
                             : 0;
      trigger = occ > params.deviation_threshold;
    }
  }

  if (!trigger)
    return RouteDecision{candidates[primary].neighbor, candidates[primary].edge,
                         false};

  std::size_t second = primary == 0 ? 1 : 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i == primary || i == second) continue;
    if (field.level(candidates[i].edge) < field.level(candidates[second].edge))
      second = i;
  }
  return RouteDecision{candidates[second].neighbor, candidates[second].edge, true};
}

std::optional<RouteDecision> next_node_aco(NodeId current, NodeId dest,
                                           const RoadNetwork& net,
                                           const PheromoneField& field,
                                           const DistanceTable& dist,
                                           const RoutingParams& params,
                                           const RngKey& key) {
  auto candidates =
      candidate_neighbors(current, dest, net, dist, params.progress_filter);
  if (candidates.empty()) return std::nullopt;

  std::vector<double> weights(candidates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const RoadEdge& e = net.edge(candidates[i].edge);
    double tau = field.value(candidates[i].edge);
    double visibility = 1.0 / (static_cast<double>(e.length_mm) / 1000.0);
    weights[i] = std::pow(tau, params.aco_alpha) *
                 std::pow(visibility, params.aco_beta);
    total += weights[i];
  }
  double u = rng::to_unit(rng::draw(key.seed, rng::Stream::AcoChoice, key.entity,
                                    key.step));
  std::size_t pick = candidates.size() - 1;
  if (total <= 0.0 || !std::isfinite(total)) {
    pick = static_cast<std::size_t>(u * static_cast<double>(candidates.size()));
    pick = std::min(pick, candidates.size() - 1);
  } else {
    double point = u * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      cumulative += weights[i];
      if (point < cumulative) {
        pick = i;
        break;
      }
    }
  }
  return RouteDecision{candidates[pick].neighbor, candidates[pick].edge, false};
}

std::optional<RouteDecision> next_node_dijkstra(NodeId current, NodeId dest,
                                                const RoadNetwork& net,
                                                const DistanceTable& dist) {
  if (!dist.reachable(current, dest)) return std::nullopt;
  NodeId next = dist.next_hop(current, dest);
  auto via = net.edge_between(current, next);
  if (!via) return std::nullopt;
  return RouteDecision{next, *via, false};
}

}  // namespace macosim
