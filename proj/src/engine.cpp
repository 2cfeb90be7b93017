#include "macosim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>

#include "macosim/rng.hpp"

namespace macosim {

void SimConfig::validate() const {
  if (network == nullptr) throw ValidationError("config: network not set");
  if (vehicle_count < 1) throw ValidationError("config: vehicle_count must be >= 1");
  if (dt_s <= 0) throw ValidationError("config: dt must be positive");
  if (max_steps < 0) throw ValidationError("config: max_steps must be >= 0");
  if (decision_latency_s < 0)
    throw ValidationError("config: decision_latency_s must be >= 0");
  if (spawn == SpawnMode::UniformWindow && spawn_window_steps < 1)
    throw ValidationError("config: spawn_window_steps must be >= 1");
  if (speed_min_mps <= 0 || speed_max_mps < speed_min_mps)
    throw ValidationError("config: speed range must satisfy 0 < min <= max");
  if (od.pattern == OdPattern::Blocks) {
    if (od.bias < 0 || od.bias > 1)
      throw ValidationError("config: od bias must lie in [0, 1]");
    if (od.block_a.empty() || od.block_b.empty())
      throw ValidationError("config: od blocks must be non-empty");
  }
  pheromone.validate();
  signal.validate();
  routing.validate();
}

bool RunResult::identical_to(const RunResult& o) const {
  return travel_times_s == o.travel_times_s && mean_travel_s == o.mean_travel_s &&
         mean_wait_s == o.mean_wait_s && mean_queue_len == o.mean_queue_len &&
         max_edge_occupancy == o.max_edge_occupancy &&
         completed_count == o.completed_count && retired_count == o.retired_count &&
         steps_executed == o.steps_executed && diagnostics == o.diagnostics;
}

double percent_reduction(double base_s, double new_s) {
  if (base_s <= 0) throw ValidationError("percent_reduction: base must be positive");
  double pct = 100.0 * (base_s - new_s) / base_s;
  return static_cast<double>(std::llround(pct * 100.0)) / 100.0;
}

namespace {

std::vector<std::pair<NodeId, NodeId>> feasible_pairs(const RoadNetwork& net,
                                                      const DistanceTable& dist) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < net.node_count(); ++u)
    for (NodeId v = 0; v < net.node_count(); ++v)
      if (u != v && dist.reachable(u, v)) pairs.emplace_back(u, v);
  return pairs;
}

std::vector<std::pair<NodeId, NodeId>> block_pairs(const std::vector<NodeId>& from,
                                                   const std::vector<NodeId>& to,
                                                   const DistanceTable& dist) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u : from)
    for (NodeId v : to)
      if (u != v && dist.reachable(u, v)) pairs.emplace_back(u, v);
  return pairs;
}

}  // namespace

std::vector<Vehicle> spawn_vehicles(const SimConfig& cfg, const RoadNetwork& net,
                                    const DistanceTable& dist) {
  auto uniform_pool = feasible_pairs(net, dist);
  if (uniform_pool.empty())
    throw ValidationError("spawn: network has no reachable origin/destination pair");

  std::vector<std::pair<NodeId, NodeId>> ab, ba;
  if (cfg.od.pattern == OdPattern::Blocks) {
    ab = block_pairs(cfg.od.block_a, cfg.od.block_b, dist);
    ba = block_pairs(cfg.od.block_b, cfg.od.block_a, dist);
  }

  std::vector<Vehicle> fleet(cfg.vehicle_count);
  for (std::int32_t vid = 0; vid < cfg.vehicle_count; ++vid) {
    Vehicle& v = fleet[vid];
    v.id = vid;

    const auto* pool = &uniform_pool;
    if (cfg.od.pattern == OdPattern::Blocks) {
      double r = rng::to_unit(rng::draw(cfg.seed, rng::Stream::SpawnPair, vid, 0));
      if (r < cfg.od.bias) {
        bool forward =
            rng::to_unit(rng::draw(cfg.seed, rng::Stream::SpawnPair, vid, 1)) < 0.5;
        const auto& biased = forward ? ab : ba;
        if (!biased.empty()) pool = &biased;
      }
    }
    auto idx = rng::below(rng::draw(cfg.seed, rng::Stream::SpawnPair, vid, 2),
                          pool->size());
    v.origin = (*pool)[idx].first;
    v.dest = (*pool)[idx].second;

    v.speed_mps = rng::uniform(rng::draw(cfg.seed, rng::Stream::SpawnSpeed, vid),
                               cfg.speed_min_mps, cfg.speed_max_mps);
    v.advance_mm = std::llround(v.speed_mps * cfg.dt_s * 1000.0);

    if (cfg.spawn == SpawnMode::UniformWindow) {
      v.depart_step = static_cast<std::int64_t>(
          rng::below(rng::draw(cfg.seed, rng::Stream::SpawnDepart, vid),
                     static_cast<std::uint64_t>(cfg.spawn_window_steps)));
    }
  }
  return fleet;
}

World init_world(const SimConfig& cfg, const DistanceTable& dist) {
  cfg.validate();
  const RoadNetwork& net = *cfg.network;

  World w;
  w.cfg = cfg;
  w.net = &net;
  w.dist = &dist;
  w.dt_us = std::llround(cfg.dt_s * 1e6);
  w.latency_us = std::llround(cfg.decision_latency_s * 1e6);
  w.field = init_random(net, cfg.pheromone, cfg.seed);

  w.signal_of_node.assign(net.node_count(), -1);
  w.binding_of_edge.assign(net.edge_count(), SignalBinding{});
  for (NodeId n = 0; n < net.node_count(); ++n) {
    if (!net.node(n).signalized) continue;
    w.signal_of_node[n] = static_cast<std::int32_t>(w.signals.size());
    w.signals.push_back(make_signal_state(net, n, cfg.signal));
  }
  for (std::int32_t s = 0; s < static_cast<std::int32_t>(w.signals.size()); ++s) {
    for (int p = 0; p < kPhaseCount; ++p)
      for (EdgeId e : w.signals[s].phases[p].feeders)
        w.binding_of_edge[e] = SignalBinding{s, p};
  }

  w.vehicles = spawn_vehicles(cfg, net, dist);
  w.edge_occupancy.assign(net.edge_count(), 0);
  return w;
}

bool finished(const World& w) {
  if (w.step >= w.cfg.max_steps) return true;
  for (const Vehicle& v : w.vehicles)
    if (v.state != VehicleState::Arrived && v.state != VehicleState::Retired)
      return false;
  return true;
}

namespace stage {

std::int64_t count_active(const World& w) {
  std::int64_t n = 0;
  for (const Vehicle& v : w.vehicles) {
    switch (v.state) {
      case VehicleState::AtNode:
      case VehicleState::OnEdge:
      case VehicleState::Queued:
        ++n;
        break;
      case VehicleState::Pending:
        if (v.depart_step == w.step) ++n;
        break;
      default:
        break;
    }
  }
  return n;
}

std::optional<StepDecision> decide(World& w, std::int32_t vid) {
  Vehicle& v = w.vehicles[vid];
  if (v.state == VehicleState::Pending && v.depart_step == w.step) {
    v.state = VehicleState::AtNode;
    v.at_node = v.origin;
  }
  if (v.state != VehicleState::AtNode) return std::nullopt;
  assert(v.at_node != v.dest);

  std::optional<RouteDecision> rd;
  switch (w.cfg.algorithm) {
    case Algorithm::Dijkstra:
      rd = next_node_dijkstra(v.at_node, v.dest, *w.net, *w.dist);
      break;
    case Algorithm::Aco:
      rd = next_node_aco(v.at_node, v.dest, *w.net, w.field, *w.dist,
                         w.cfg.routing,
                         RngKey{w.cfg.seed, static_cast<std::uint64_t>(vid),
                                static_cast<std::uint64_t>(w.step)});
      break;
    case Algorithm::Maco:
    case Algorithm::MacoP:
      rd = next_node_maco(v.at_node, v.dest, *w.net, w.field, *w.dist,
                          w.cfg.routing, w.active_count, w.edge_occupancy);
      break;
  }

  if (!rd) {
    v.state = VehicleState::Retired;
    return std::nullopt;
  }

  v.state = VehicleState::OnEdge;
  v.on_edge = rd->via;
  v.progress_mm = v.overshoot_mm;  // keep motion continuous across plain nodes
  v.overshoot_mm = 0;
  v.latency_debt_us += w.latency_us;
  ++v.decisions;
  if (rd->deviated) ++v.deviations;
  v.path_edges.push_back(rd->via);
  v.path_length_mm += w.net->edge(rd->via).length_mm;
  return StepDecision{vid, rd->via};
}

std::int64_t density_sample(const World& w, std::int32_t sig) {
  return w.signals[sig].total_queued();
}

void assign(World& w, std::int32_t sig) {
  SignalState& s = w.signals[sig];
  if (s.green_elapsed_s < w.cfg.signal.green_duration_s) return;
  int phase = 0;
  switch (w.cfg.controller) {
    case ControllerKind::Fixed:
      phase = select_phase_fixed(s, w.cfg.signal);
      break;
    case ControllerKind::Adaptive:
      phase = select_phase_adaptive(s, w.cfg.signal);
      break;
    case ControllerKind::Preemptive:
      phase = select_phase_preemptive(s, w.cfg.signal);
      break;
  }
  assign_green(s, phase);
}

void discharge_signal(World& w, std::int32_t sig) {
  SignalState& s = w.signals[sig];
  auto released = discharge(s, w.cfg.dt_s, s.discharge_lanes, w.cfg.signal);
  for (std::int32_t vid : released) {
    Vehicle& v = w.vehicles[vid];
    // The release step still counts as waiting.
    v.queued_steps += w.step - v.queue_joined_step + 1;
    v.state = VehicleState::AtNode;
    v.at_node = s.node;
    v.queued_phase = -1;
  }
}

MotionOutcome move(World& w, std::int32_t vid) {
  Vehicle& v = w.vehicles[vid];
  if (v.state != VehicleState::OnEdge) return {};

  if (v.latency_debt_us >= w.dt_us) {
    v.latency_debt_us -= w.dt_us;
    ++v.latency_steps;
    return {};
  }

  v.progress_mm += v.advance_mm;
  ++v.driving_steps;
  const RoadEdge& e = w.net->edge(v.on_edge);
  if (v.progress_mm < e.length_mm) return {};

  const LengthMm overshoot = v.progress_mm - e.length_mm;
  const NodeId reached = e.to;
  if (reached == v.dest) {
    v.state = VehicleState::Arrived;
    v.arrive_step = w.step + 1;  // transitions land at end of step
    MotionOutcome out;
    out.kind = MotionOutcome::Kind::Complete;
    return out;
  }
  const SignalBinding bind = w.binding_of_edge[v.on_edge];
  if (bind.signal >= 0) {
    v.state = VehicleState::Queued;
    v.at_node = reached;
    v.queued_phase = bind.phase;
    v.queue_joined_step = w.step + 1;
    v.progress_mm = 0;
    MotionOutcome out;
    out.kind = MotionOutcome::Kind::Enqueue;
    out.enqueue = PendingEnqueue{vid, bind.signal, bind.phase};
    return out;
  }
  v.state = VehicleState::AtNode;
  v.at_node = reached;
  v.overshoot_mm = overshoot;
  v.progress_mm = 0;
  return {};
}

void commit_enqueue(World& w, const PendingEnqueue& pe) {
  const Vehicle& v = w.vehicles[pe.vehicle];
  w.signals[pe.signal].phases[pe.phase].queue.push_back(
      QueueEntry{pe.vehicle, v.queue_joined_step});
}

void update_signal_timers(World& w, std::int32_t sig) {
  SignalState& s = w.signals[sig];
  const std::int64_t now = w.step + 1;
  for (SignalPhase& p : s.phases) {
    p.head_wait_s = p.queue.empty()
                        ? 0.0
                        : static_cast<double>(now - p.queue.front().enqueue_step) *
                              w.cfg.dt_s;
  }
  ++s.green_elapsed_steps;
  s.green_elapsed_s = static_cast<double>(s.green_elapsed_steps) * w.cfg.dt_s;
}

void refresh_occupancy(World& w) {
  std::fill(w.edge_occupancy.begin(), w.edge_occupancy.end(), 0);
  for (const Vehicle& v : w.vehicles)
    if (v.state == VehicleState::OnEdge) ++w.edge_occupancy[v.on_edge];
  for (std::int32_t occ : w.edge_occupancy)
    w.metrics.max_edge_occupancy = std::max(w.metrics.max_edge_occupancy, occ);
}

}  // namespace stage

void pheromone_commit_sequential(World& w) {
  auto& tau = w.field.raw();
  switch (w.cfg.algorithm) {
    case Algorithm::Maco:
    case Algorithm::MacoP:
      for (const StepDecision& d : w.decisions) {
        if (w.cfg.pheromone.decrement_siblings_only) {
          apply_maco_update_scoped(tau, d.edge,
                                   w.net->out_edges(w.net->edge(d.edge).from),
                                   w.cfg.pheromone);
        } else {
          apply_maco_update(tau, d.edge, w.cfg.pheromone);
        }
      }
      break;
    case Algorithm::Aco:
      for (const StepCompletion& c : w.completions) {
        const Vehicle& v = w.vehicles[c.vehicle];
        apply_aco_deposit(tau, v.path_edges, v.path_length_mm, w.cfg.pheromone);
      }
      break;
    case Algorithm::Dijkstra:
      break;
  }
}

void sequential_step(World& w) {
  const auto vehicle_count = static_cast<std::int32_t>(w.vehicles.size());
  const auto signal_count = static_cast<std::int32_t>(w.signals.size());

  w.decisions.clear();
  w.completions.clear();
  w.enqueues.clear();
  w.active_count = stage::count_active(w);

  // B: routing decisions.
  for (std::int32_t vid = 0; vid < vehicle_count; ++vid)
    if (auto d = stage::decide(w, vid)) w.decisions.push_back(*d);

  // C: densities.
  std::int64_t queued_total = 0;
  for (std::int32_t s = 0; s < signal_count; ++s)
    queued_total += stage::density_sample(w, s);
  w.metrics.queue_len_sample_total += queued_total;
  w.metrics.queue_samples += signal_count;

  // D: green assignment.
  for (std::int32_t s = 0; s < signal_count; ++s) stage::assign(w, s);

  // E1: discharge.
  for (std::int32_t s = 0; s < signal_count; ++s) stage::discharge_signal(w, s);

  // E2: motion.
  for (std::int32_t vid = 0; vid < vehicle_count; ++vid) {
    auto out = stage::move(w, vid);
    if (out.kind == stage::MotionOutcome::Kind::Enqueue)
      w.enqueues.push_back(out.enqueue);
    else if (out.kind == stage::MotionOutcome::Kind::Complete)
      w.completions.push_back({vid});
  }

  // E3: queue commits (ascending vehicle id) and timers.
  for (const PendingEnqueue& pe : w.enqueues) stage::commit_enqueue(w, pe);
  for (std::int32_t s = 0; s < signal_count; ++s)
    stage::update_signal_timers(w, s);

  // F: pheromone commit.
  pheromone_commit_sequential(w);

  // G: evaporation.
  apply_evaporate(w.field.raw(), w.cfg.pheromone);

  stage::refresh_occupancy(w);
  ++w.step;
}

RunResult collect_result(const World& w) {
  RunResult r;
  r.steps_executed = w.step;
  r.travel_times_s.resize(w.vehicles.size(), -1.0);

  double travel_sum = 0.0, wait_sum = 0.0;
  for (const Vehicle& v : w.vehicles) {
    if (v.state == VehicleState::Arrived) {
      double travel = static_cast<double>(v.arrive_step - v.depart_step) * w.cfg.dt_s;
      r.travel_times_s[v.id] = travel;
      travel_sum += travel;
      wait_sum += static_cast<double>(v.queued_steps) * w.cfg.dt_s +
                  static_cast<double>(v.decisions) * w.cfg.decision_latency_s;
      ++r.completed_count;
    } else if (v.state == VehicleState::Retired) {
      ++r.retired_count;
      r.diagnostics.push_back("vehicle " + std::to_string(v.id) +
                              " retired unroutable at node " +
                              std::to_string(v.at_node));
    }
  }
  if (r.completed_count > 0) {
    r.mean_travel_s = travel_sum / r.completed_count;
    r.mean_wait_s = wait_sum / r.completed_count;
  }
  if (w.metrics.queue_samples > 0) {
    r.mean_queue_len = static_cast<double>(w.metrics.queue_len_sample_total) /
                       static_cast<double>(w.metrics.queue_samples);
  }
  r.max_edge_occupancy = w.metrics.max_edge_occupancy;
  return r;
}

RunResult run(const SimConfig& cfg, const DistanceTable& dist) {
  const auto t0 = std::chrono::steady_clock::now();
  World w = init_world(cfg, dist);
  while (!finished(w)) sequential_step(w);
  RunResult r = collect_result(w);
  r.wall_clock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return r;
}

RunResult run(const SimConfig& cfg) {
  cfg.validate();
  DistanceTable dist = all_pairs_distances(*cfg.network);
  return run(cfg, dist);
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Dijkstra: return "dijkstra";
    case Algorithm::Aco: return "aco";
    case Algorithm::Maco: return "maco";
    case Algorithm::MacoP: return "maco-p";
  }
  return "?";
}

const char* controller_name(ControllerKind c) {
  switch (c) {
    case ControllerKind::Fixed: return "fixed";
    case ControllerKind::Adaptive: return "adaptive";
    case ControllerKind::Preemptive: return "preemptive";
  }
  return "?";
}

}  // namespace macosim
