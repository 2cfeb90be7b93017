#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macosim/net.hpp"
#include "macosim/pheromone.hpp"
#include "macosim/routing.hpp"
#include "macosim/signals.hpp"

namespace macosim {

enum class Algorithm { Dijkstra, Aco, Maco, MacoP };
enum class ControllerKind { Fixed, Adaptive, Preemptive };
enum class SpawnMode { AllAtStart, UniformWindow };
enum class OdPattern { UniformPairs, Blocks };

// Origin/destination demand. Blocks biases a fraction of trips to run
// between two node sets (either direction), the rest stay uniform.
struct OdSpec {
  OdPattern pattern = OdPattern::UniformPairs;
  double bias = 0.8;
  std::vector<NodeId> block_a;
  std::vector<NodeId> block_b;
};

struct SimConfig {
  const RoadNetwork* network = nullptr;
  Algorithm algorithm = Algorithm::Dijkstra;
  ControllerKind controller = ControllerKind::Fixed;
  int vehicle_count = 1;
  double dt_s = 1.0;
  std::int64_t max_steps = 5000;
  std::uint64_t seed = 0;
  // Simulated seconds a vehicle loses per routing decision (reaction time
  // coupled to how fast routes are computed). Consumed in whole dt ticks.
  double decision_latency_s = 0.0;
  SpawnMode spawn = SpawnMode::AllAtStart;
  int spawn_window_steps = 1;
  OdSpec od;
  double speed_min_mps = 50.0;
  double speed_max_mps = 80.0;
  PheromoneParams pheromone;
  SignalParams signal;
  RoutingParams routing;

  void validate() const;
};

enum class VehicleState : std::uint8_t {
  Pending,   // not yet departed
  AtNode,    // waiting for a routing decision
  OnEdge,    // driving (or consuming decision latency)
  Queued,    // in a signal phase queue
  Arrived,
  Retired,   // unroutable, removed with a diagnostic
};

struct Vehicle {
  std::int32_t id = 0;
  NodeId origin = kNoNode;
  NodeId dest = kNoNode;
  double speed_mps = 0.0;
  LengthMm advance_mm = 0;  // distance per driving step

  VehicleState state = VehicleState::Pending;
  NodeId at_node = kNoNode;       // AtNode / Queued
  EdgeId on_edge = kNoEdge;       // OnEdge
  LengthMm progress_mm = 0;       // position along on_edge
  LengthMm overshoot_mm = 0;      // motion carried across an unsignalized node
  int queued_phase = -1;
  std::int64_t queue_joined_step = 0;

  std::int64_t depart_step = 0;
  std::int64_t arrive_step = -1;
  std::int64_t latency_debt_us = 0;

  // Every active step falls in exactly one bucket, so
  // arrive_step - depart_step == driving + queued + latency.
  std::int64_t driving_steps = 0;
  std::int64_t queued_steps = 0;
  std::int64_t latency_steps = 0;
  std::int32_t decisions = 0;
  std::int32_t deviations = 0;

  std::vector<EdgeId> path_edges;
  LengthMm path_length_mm = 0;
};

struct RunResult {
  // One entry per vehicle; -1 when the vehicle never arrived.
  std::vector<double> travel_times_s;
  double mean_travel_s = 0.0;
  double mean_wait_s = 0.0;
  double mean_queue_len = 0.0;
  std::int32_t max_edge_occupancy = 0;
  int completed_count = 0;
  int retired_count = 0;
  std::int64_t steps_executed = 0;
  std::vector<std::string> diagnostics;
  std::int64_t wall_clock_ms = 0;

  // Equality over everything except wall clock.
  bool identical_to(const RunResult& other) const;
};

// 100 * (base - new) / base, rounded to two decimals.
double percent_reduction(double base_s, double new_s);

std::vector<Vehicle> spawn_vehicles(const SimConfig& cfg, const RoadNetwork& net,
                                    const DistanceTable& dist);

// ---------------------------------------------------------------------------
// Simulation world and per-entity stage kernels. One step runs stages in
// fixed order with a barrier between them:
//   B  routing decisions (per vehicle; also activates departures)
//   C  per-signal queue densities (metrics sample)
//   D  green assignment at signals whose green time elapsed
//   E1 discharge green queues (per signal)
//   E2 motion (per vehicle; arrivals into signal queues are deferred deltas)
//   E3 enqueue commit in ascending vehicle id + signal timers
//   F  pheromone commit (the step's decisions, ascending vehicle id)
//   G  evaporation (per edge)
// A stage reads only state committed by earlier stages; cross-entity writes
// go through the per-step delta lists. The sequential executor below is the
// reference; the parallel executor replays the same kernels per partition.
// ---------------------------------------------------------------------------

struct StepDecision {
  std::int32_t vehicle = -1;
  EdgeId edge = kNoEdge;
};

struct PendingEnqueue {
  std::int32_t vehicle = -1;
  std::int32_t signal = -1;
  int phase = -1;
};

struct StepCompletion {
  std::int32_t vehicle = -1;
};

struct SignalBinding {
  std::int32_t signal = -1;  // index into World::signals, -1 if none
  int phase = -1;
};

struct Metrics {
  std::int64_t queue_len_sample_total = 0;
  std::int64_t queue_samples = 0;
  std::int32_t max_edge_occupancy = 0;
};

struct World {
  SimConfig cfg;
  const RoadNetwork* net = nullptr;
  const DistanceTable* dist = nullptr;
  PheromoneField field;
  std::vector<SignalState> signals;
  std::vector<std::int32_t> signal_of_node;   // node -> signal index or -1
  std::vector<SignalBinding> binding_of_edge; // edge -> (signal, phase)
  std::vector<Vehicle> vehicles;
  std::vector<std::int32_t> edge_occupancy;   // snapshot at end of prev step
  std::int64_t step = 0;
  std::int64_t active_count = 0;              // vehicles in play this step
  std::int64_t dt_us = 0;
  std::int64_t latency_us = 0;
  Metrics metrics;

  // Step scratch used by the sequential executor.
  std::vector<StepDecision> decisions;
  std::vector<StepCompletion> completions;
  std::vector<PendingEnqueue> enqueues;
};

World init_world(const SimConfig& cfg, const DistanceTable& dist);
bool finished(const World& w);
RunResult collect_result(const World& w);

namespace stage {

std::int64_t count_active(const World& w);
std::optional<StepDecision> decide(World& w, std::int32_t vid);
std::int64_t density_sample(const World& w, std::int32_t sig);
void assign(World& w, std::int32_t sig);
void discharge_signal(World& w, std::int32_t sig);

struct MotionOutcome {
  enum class Kind : std::uint8_t { None, Enqueue, Complete } kind = Kind::None;
  PendingEnqueue enqueue;
};
MotionOutcome move(World& w, std::int32_t vid);

void commit_enqueue(World& w, const PendingEnqueue& pe);
void update_signal_timers(World& w, std::int32_t sig);
void refresh_occupancy(World& w);

}  // namespace stage

// Literal stage F: apply each decision's pheromone update (or each
// completion's deposit for the ant baseline) one by one, ascending vehicle.
void pheromone_commit_sequential(World& w);

void sequential_step(World& w);

RunResult run(const SimConfig& cfg);
RunResult run(const SimConfig& cfg, const DistanceTable& dist);

const char* algorithm_name(Algorithm a);
const char* controller_name(ControllerKind c);

}  // namespace macosim
