#include "macosim/signals.hpp"

#include <algorithm>
#include <cmath>

namespace macosim {

void SignalParams::validate() const {
  if (th_max < 1) throw ValidationError("signal th_max must be >= 1");
  if (t_max <= 0) throw ValidationError("signal t_max must be positive");
  if (green_duration_s <= 0)
    throw ValidationError("signal green_duration must be positive");
  if (saturation_flow <= 0)
    throw ValidationError("signal saturation_flow must be positive");
  std::array<bool, kPhaseCount> seen{};
  for (int p : fixed_cycle_order) {
    if (p < 0 || p >= kPhaseCount || seen[p])
      throw ValidationError("signal fixed_cycle_order must be a permutation of 0..7");
    seen[p] = true;
  }
}

int SignalState::total_queued() const {
  int total = 0;
  for (const SignalPhase& p : phases) total += static_cast<int>(p.queue.size());
  return total;
}

SignalState make_signal_state(const RoadNetwork& net, NodeId node,
                              const SignalParams& params) {
  SignalState st;
  st.node = node;
  int slot = 0;
  for (EdgeId e : net.in_edges(node)) {  // ascending edge id
    st.phases[slot % kPhaseCount].feeders.push_back(e);
    st.discharge_lanes = std::max(st.discharge_lanes, net.edge(e).lanes);
    ++slot;
  }
  // Start all-red: cursor parked on the last phase of the order so the first
  // default selection grants the first, and elapsed already at the duration
  // so step 0 is an epoch.
  st.cycle_cursor = params.fixed_cycle_order[kPhaseCount - 1];
  st.green = st.cycle_cursor;
  st.green_elapsed_s = params.green_duration_s;
  return st;
}

namespace {

int order_position(const SignalParams& params, int phase) {
  for (int i = 0; i < kPhaseCount; ++i)
    if (params.fixed_cycle_order[i] == phase) return i;
  return 0;
}

int next_in_order(const SignalParams& params, int cursor) {
  return params.fixed_cycle_order[(order_position(params, cursor) + 1) % kPhaseCount];
}

}  // namespace

int select_phase_preemptive(const SignalState& state, const SignalParams& params) {
  // Rule 1: longest queue among phases whose queue exceeds th_max.
  int best = -1;
  for (int p = 0; p < kPhaseCount; ++p) {
    if (state.queue_len(p) > params.th_max &&
        (best == -1 || state.queue_len(p) > state.queue_len(best)))
      best = p;
  }
  if (best != -1) return best;

  // Rule 2: longest head wait among phases whose head wait exceeds t_max.
  for (int p = 0; p < kPhaseCount; ++p) {
    if (state.phases[p].head_wait_s > params.t_max &&
        (best == -1 || state.phases[p].head_wait_s > state.phases[best].head_wait_s))
      best = p;
  }
  if (best != -1) return best;

  // Rule 3: longest nonempty queue.
  for (int p = 0; p < kPhaseCount; ++p) {
    if (state.queue_len(p) > 0 &&
        (best == -1 || state.queue_len(p) > state.queue_len(best)))
      best = p;
  }
  if (best != -1) return best;

  // Rule 4: everything empty, continue the fixed cycle.
  return next_in_order(params, state.cycle_cursor);
}

int select_phase_fixed(const SignalState& state, const SignalParams& params) {
  return next_in_order(params, state.cycle_cursor);
}

int select_phase_adaptive(const SignalState& state, const SignalParams& params) {
  int pos = order_position(params, state.cycle_cursor);
  for (int i = 0; i < kPhaseCount; ++i) {
    int p = params.fixed_cycle_order[(pos + i) % kPhaseCount];
    if (state.queue_len(p) > 0) return p;
  }
  return next_in_order(params, state.cycle_cursor);
}

std::array<int, kPhaseCount> compute_density(const SignalState& state) {
  std::array<int, kPhaseCount> density{};
  for (int p = 0; p < kPhaseCount; ++p) density[p] = state.queue_len(p);
  return density;
}

void assign_green(SignalState& state, int phase) {
  state.green = phase;
  state.cycle_cursor = phase;
  state.green_elapsed_s = 0.0;
  state.green_elapsed_steps = 0;
  state.phases[phase].service_remainder = 0.0;
}

std::vector<std::int32_t> discharge(SignalState& state, double dt_s, int lanes,
                                    const SignalParams& params) {
  if (dt_s <= 0) throw ValidationError("discharge: dt must be positive");
  SignalPhase& phase = state.phases[state.green];
  phase.service_remainder += params.saturation_flow * lanes * dt_s;
  auto budget = static_cast<int>(std::floor(phase.service_remainder));
  phase.service_remainder -= budget;

  std::vector<std::int32_t> released;
  while (budget > 0 && !phase.queue.empty()) {
    released.push_back(phase.queue.front().vehicle);
    phase.queue.pop_front();
    --budget;
  }
  if (phase.queue.empty()) phase.head_wait_s = 0.0;
  return released;
}

}  // namespace macosim
