#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "macosim/net.hpp"

namespace macosim {

inline constexpr int kPhaseCount = 8;

struct SignalParams {
  int th_max = 10;               // queue-length preemption threshold (vehicles)
  double t_max = 120.0;          // head-wait preemption threshold (seconds)
  double green_duration_s = 10.0;
  double saturation_flow = 0.5;  // vehicles per second per lane while green
  std::array<int, kPhaseCount> fixed_cycle_order = {0, 1, 2, 3, 4, 5, 6, 7};

  void validate() const;
};

struct QueueEntry {
  std::int32_t vehicle = -1;
  std::int64_t enqueue_step = 0;  // step index at which waiting started
};

struct SignalPhase {
  std::deque<QueueEntry> queue;
  double head_wait_s = 0.0;      // seconds since the head vehicle joined
  double service_remainder = 0.0;
  std::vector<EdgeId> feeders;   // incoming edges mapped to this phase
};

// Eight-phase intersection. Exactly one phase is green at any time; the
// cycle cursor remembers the last granted phase so default-order selection
// can resume after it.
struct SignalState {
  NodeId node = kNoNode;
  std::array<SignalPhase, kPhaseCount> phases;
  int green = 0;
  double green_elapsed_s = 0.0;
  std::int64_t green_elapsed_steps = 0;  // green_elapsed_s = steps * dt, exact
  int cycle_cursor = 0;
  int discharge_lanes = 1;  // max lanes over the node's incoming edges

  int queue_len(int phase) const {
    return static_cast<int>(phases[phase].queue.size());
  }
  int total_queued() const;
};

// Builds the phase mapping for a signalized node: incoming edges are
// assigned round-robin by ascending edge id; phases beyond the in-degree
// stay permanently empty. green_elapsed starts at the green duration so the
// first step is an assignment epoch.
SignalState make_signal_state(const RoadNetwork& net, NodeId node,
                              const SignalParams& params);

// Preemptive controller. Priority: (1) largest queue above th_max, (2)
// longest head wait above t_max, (3) largest nonempty queue, (4) next phase
// in fixed order after the cursor. Ties break to the lowest phase index.
int select_phase_preemptive(const SignalState& state, const SignalParams& params);

// Fixed-time controller: next phase in fixed order, queues ignored.
int select_phase_fixed(const SignalState& state, const SignalParams& params);

// Adaptive (non-preemptive) controller: first nonempty phase scanning the
// fixed order from the cursor inclusive; all empty falls back to fixed.
int select_phase_adaptive(const SignalState& state, const SignalParams& params);

std::array<int, kPhaseCount> compute_density(const SignalState& state);

// Applies a controller decision at an assignment epoch.
void assign_green(SignalState& state, int phase);

// Releases up to floor(accumulated saturation_flow * lanes * dt) vehicles
// from the head of the green queue, FIFO. Fractional service accumulates in
// the phase's remainder.
std::vector<std::int32_t> discharge(SignalState& state, double dt_s, int lanes,
                                    const SignalParams& params);

}  // namespace macosim
