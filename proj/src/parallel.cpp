#include "macosim/parallel.hpp"

#include <algorithm>
#include <chrono>

namespace macosim {

std::vector<EntityRange> partition_entities(std::int32_t count, int workers) {
  if (count < 0) throw ValidationError("partition: count must be >= 0");
  if (workers < 1) throw ValidationError("partition: workers must be >= 1");
  std::vector<EntityRange> ranges(workers);
  const std::int32_t base = count / workers;
  const std::int32_t extra = count % workers;
  std::int32_t at = 0;
  for (int i = 0; i < workers; ++i) {
    std::int32_t len = base + (i < extra ? 1 : 0);
    ranges[i] = {at, at + len};
    at += len;
  }
  return ranges;
}

StagePlan make_stage_plan(Stage stage, std::int32_t entity_count, int workers) {
  return StagePlan{stage, partition_entities(entity_count, workers), workers};
}

WorkerPool::WorkerPool(int workers) {
  if (workers < 1) throw ValidationError("worker pool needs at least one worker");
  threads_.reserve(workers);
  for (int i = 0; i < workers; ++i)
    threads_.emplace_back([this, i] { worker_main(i); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  work_cv_.notify_all();
  for (std::thread& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(int)>& fn) {
  std::unique_lock lock(mu_);
  job_ = &fn;
  remaining_ = size();
  ++generation_;
  work_cv_.notify_all();
  done_cv_.wait(lock, [this] { return remaining_ == 0; });
  job_ = nullptr;
}

void WorkerPool::worker_main(int index) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(int)>* job = nullptr;
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
    }
    (*job)(index);
    {
      std::lock_guard lock(mu_);
      if (--remaining_ == 0) done_cv_.notify_one();
    }
  }
}

int hardware_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

TauMicros fold_maco_edge(TauMicros t, std::span<const std::int32_t> positions,
                         std::int64_t total_decisions,
                         const PheromoneParams& params) {
  const TauMicros lo = params.min_u(), hi = params.max_u();
  const TauMicros inc = params.inc_u(), dec = params.dec_u();
  std::int64_t done = 0;
  for (std::int32_t p : positions) {
    const std::int64_t gap = p - done;
    if (gap > 0) t = std::max(lo, t - gap * dec);
    t = std::min(hi, t + inc);
    done = p + 1;
  }
  const std::int64_t gap = total_decisions - done;
  if (gap > 0) t = std::max(lo, t - gap * dec);
  return t;
}

namespace {

class ParallelRunner {
 public:
  ParallelRunner(const SimConfig& cfg, const DistanceTable& dist, int workers)
      : world_(init_world(cfg, dist)),
        pool_(workers),
        decision_buf_(workers),
        enqueue_buf_(workers),
        completion_buf_(workers),
        queued_totals_(workers, 0),
        vehicle_plan_(make_stage_plan(Stage::RouteDecisions,
                                      static_cast<std::int32_t>(world_.vehicles.size()),
                                      workers)),
        signal_plan_(make_stage_plan(Stage::Densities,
                                     static_cast<std::int32_t>(world_.signals.size()),
                                     workers)),
        edge_plan_(make_stage_plan(Stage::Evaporation,
                                   static_cast<std::int32_t>(world_.net->edge_count()),
                                   workers)),
        chosen_positions_(world_.net->edge_count()),
        deposit_amounts_(world_.net->edge_count()) {}

  RunResult execute() {
    while (!finished(world_)) step();
    return collect_result(world_);
  }

 private:
  void step() {
    World& w = world_;
    w.active_count = stage::count_active(w);
    decision_buf_.clear();
    enqueue_buf_.clear();
    completion_buf_.clear();

    // B: decisions per vehicle partition.
    pool_.run([&](int i) {
      auto [lo, hi] = vehicle_plan_.tasks[i];
      auto& lane = decision_buf_.lane(i);
      for (std::int32_t vid = lo; vid < hi; ++vid)
        if (auto d = stage::decide(w, vid)) lane.push_back(*d);
    });

    // C: densities, folded in worker order.
    pool_.run([&](int i) {
      auto [lo, hi] = signal_plan_.tasks[i];
      std::int64_t total = 0;
      for (std::int32_t s = lo; s < hi; ++s) total += stage::density_sample(w, s);
      queued_totals_[i] = total;
    });
    for (std::int64_t t : queued_totals_) w.metrics.queue_len_sample_total += t;
    w.metrics.queue_samples += static_cast<std::int64_t>(w.signals.size());

    // D: green assignment.
    pool_.run([&](int i) {
      auto [lo, hi] = signal_plan_.tasks[i];
      for (std::int32_t s = lo; s < hi; ++s) stage::assign(w, s);
    });

    // E1: discharge. Each queued vehicle belongs to exactly one signal, so
    // writes to released vehicles cannot collide.
    pool_.run([&](int i) {
      auto [lo, hi] = signal_plan_.tasks[i];
      for (std::int32_t s = lo; s < hi; ++s) stage::discharge_signal(w, s);
    });

    // E2: motion; queue arrivals become deltas.
    pool_.run([&](int i) {
      auto [lo, hi] = vehicle_plan_.tasks[i];
      for (std::int32_t vid = lo; vid < hi; ++vid) {
        auto out = stage::move(w, vid);
        if (out.kind == stage::MotionOutcome::Kind::Enqueue)
          enqueue_buf_.lane(i).push_back(out.enqueue);
        else if (out.kind == stage::MotionOutcome::Kind::Complete)
          completion_buf_.lane(i).push_back({vid});
      }
    });

    // E3: commit arrivals in ascending vehicle id, then timers.
    enqueue_buf_.commit([&](const PendingEnqueue& pe) { stage::commit_enqueue(w, pe); });
    pool_.run([&](int i) {
      auto [lo, hi] = signal_plan_.tasks[i];
      for (std::int32_t s = lo; s < hi; ++s) stage::update_signal_timers(w, s);
    });

    // F: pheromone commit.
    commit_pheromone();

    // G: evaporation per edge partition.
    pool_.run([&](int i) {
      auto [lo, hi] = edge_plan_.tasks[i];
      auto& tau = w.field.raw();
      for (std::int32_t e = lo; e < hi; ++e)
        tau[e] = evaporate_one(tau[e], w.cfg.pheromone);
    });

    stage::refresh_occupancy(w);
    ++w.step;
  }

  void commit_pheromone() {
    World& w = world_;
    switch (w.cfg.algorithm) {
      case Algorithm::Dijkstra:
        return;
      case Algorithm::Maco:
      case Algorithm::MacoP: {
        if (w.cfg.pheromone.decrement_siblings_only) {
          // Sibling-scoped decrements touch only a handful of edges per
          // decision; literal ascending replay is already cheap.
          auto& tau = w.field.raw();
          decision_buf_.commit([&](const StepDecision& d) {
            apply_maco_update_scoped(tau, d.edge,
                                     w.net->out_edges(w.net->edge(d.edge).from),
                                     w.cfg.pheromone);
          });
          return;
        }
        // Network-wide mode: index each edge's selection positions, then
        // fold every edge independently.
        for (EdgeId e : touched_) chosen_positions_[e].clear();
        touched_.clear();
        std::int32_t index = 0;
        decision_buf_.commit([&](const StepDecision& d) {
          if (chosen_positions_[d.edge].empty()) touched_.push_back(d.edge);
          chosen_positions_[d.edge].push_back(index++);
        });
        const std::int64_t total = index;
        if (total == 0) return;
        pool_.run([&](int i) {
          auto [lo, hi] = edge_plan_.tasks[i];
          auto& tau = w.field.raw();
          for (std::int32_t e = lo; e < hi; ++e)
            tau[e] = fold_maco_edge(tau[e], chosen_positions_[e], total,
                                    w.cfg.pheromone);
        });
        return;
      }
      case Algorithm::Aco: {
        for (EdgeId e : touched_) deposit_amounts_[e].clear();
        touched_.clear();
        completion_buf_.commit([&](const StepCompletion& c) {
          const Vehicle& v = w.vehicles[c.vehicle];
          if (v.path_edges.empty()) return;
          const TauMicros amount =
              deposit_amount(v.path_length_mm, w.cfg.pheromone);
          for (EdgeId e : v.path_edges) {
            if (deposit_amounts_[e].empty()) touched_.push_back(e);
            deposit_amounts_[e].push_back(amount);
          }
        });
        if (touched_.empty()) return;
        pool_.run([&](int i) {
          auto [lo, hi] = edge_plan_.tasks[i];
          auto& tau = w.field.raw();
          const TauMicros hi_clamp = w.cfg.pheromone.max_u();
          for (std::int32_t e = lo; e < hi; ++e)
            for (TauMicros amount : deposit_amounts_[e])
              tau[e] = std::min(hi_clamp, tau[e] + amount);
        });
        return;
      }
    }
  }

  World world_;
  WorkerPool pool_;
  DeltaBuffer<StepDecision> decision_buf_;
  DeltaBuffer<PendingEnqueue> enqueue_buf_;
  DeltaBuffer<StepCompletion> completion_buf_;
  std::vector<std::int64_t> queued_totals_;
  StagePlan vehicle_plan_;
  StagePlan signal_plan_;
  StagePlan edge_plan_;
  std::vector<std::vector<std::int32_t>> chosen_positions_;
  std::vector<std::vector<TauMicros>> deposit_amounts_;
  std::vector<EdgeId> touched_;
};

}  // namespace

RunResult parallel_run(const SimConfig& cfg, const DistanceTable& dist, int workers) {
  if (workers <= 0) workers = hardware_workers();
  const auto t0 = std::chrono::steady_clock::now();
  ParallelRunner runner(cfg, dist, workers);
  RunResult r = runner.execute();
  r.wall_clock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return r;
}

RunResult parallel_run(const SimConfig& cfg, int workers) {
  cfg.validate();
  DistanceTable dist = all_pairs_distances(*cfg.network);
  return parallel_run(cfg, dist, workers);
}

}  // namespace macosim
