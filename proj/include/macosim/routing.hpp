#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "macosim/net.hpp"
#include "macosim/pheromone.hpp"

namespace macosim {

enum class DeviationMode { Global, EdgeOccupancy };

struct RoutingParams {
  std::int64_t deviation_threshold = 1000;
  DeviationMode deviation_mode = DeviationMode::Global;
  // Restrict candidates to neighbors strictly closer to the destination.
  bool progress_filter = true;
  double aco_alpha = 1.0;
  double aco_beta = 2.0;

  void validate() const;
};

struct RouteDecision {
  NodeId next = kNoNode;
  EdgeId via = kNoEdge;
  bool deviated = false;

  bool operator==(const RouteDecision&) const = default;
};

struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t entity = 0;
  std::uint64_t step = 0;
};

// Out-neighbors that can still reach dest, narrowed to strict progress when
// the filter is on (falling back to all reachable neighbors if that empties
// the set). Order follows the adjacency list: ascending neighbor id.
std::vector<OutEdge> candidate_neighbors(NodeId current, NodeId dest,
                                         const RoadNetwork& net,
                                         const DistanceTable& dist,
                                         bool progress_filter);

// Min-pheromone choice with congestion deviation: pheromone marks traffic to
// avoid, so the primary pick is the candidate whose edge carries the least.
// When the trigger fires (global vehicle count, or occupancy of the primary
// edge, above the threshold) and a second candidate exists, the second-least
// candidate is taken instead and flagged as deviated.
std::optional<RouteDecision> next_node_maco(NodeId current, NodeId dest,
                                            const RoadNetwork& net,
                                            const PheromoneField& field,
                                            const DistanceTable& dist,
                                            const RoutingParams& params,
                                            std::int64_t n_t,
                                            std::span<const std::int32_t> edge_occupancy = {});

// Classic ant baseline: probabilistic choice with weight
// tau^alpha * (1/length)^beta over the same candidate set. All-zero weights
// fall back to uniform. Draws are keyed, never stateful.
std::optional<RouteDecision> next_node_aco(NodeId current, NodeId dest,
                                           const RoadNetwork& net,
                                           const PheromoneField& field,
                                           const DistanceTable& dist,
                                           const RoutingParams& params,
                                           const RngKey& key);

// Follow the precomputed next-hop matrix.
std::optional<RouteDecision> next_node_dijkstra(NodeId current, NodeId dest,
                                                const RoadNetwork& net,
                                                const DistanceTable& dist);

}  // namespace macosim
