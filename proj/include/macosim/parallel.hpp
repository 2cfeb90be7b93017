#pragma once

#include <cassert>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "macosim/engine.hpp"

namespace macosim {

struct EntityRange {
  std::int32_t begin = 0;
  std::int32_t end = 0;

  bool operator==(const EntityRange&) const = default;
};

// Contiguous, disjoint, covering ranges whose sizes differ by at most one.
std::vector<EntityRange> partition_entities(std::int32_t count, int workers);

// Pipeline stages, in execution order. Vehicles partition B/E2/F, signals
// C/D/E1/E3, edges F/G.
enum class Stage : std::uint8_t {
  RouteDecisions,   // B
  Densities,        // C
  GreenAssignment,  // D
  Discharge,        // E1
  Motion,           // E2
  QueueCommit,      // E3
  PheromoneCommit,  // F
  Evaporation,      // G
};

struct StagePlan {
  Stage stage;
  std::vector<EntityRange> tasks;  // one range per worker
  int worker_count = 1;
};

StagePlan make_stage_plan(Stage stage, std::int32_t entity_count, int workers);

// Per-worker ordered mutation records. Workers own contiguous ascending
// entity ranges, so visiting lanes in worker order replays records in
// ascending entity id no matter which thread produced them.
template <typename Record>
class DeltaBuffer {
 public:
  explicit DeltaBuffer(int workers) : lanes_(workers) {}

  std::vector<Record>& lane(int worker) { return lanes_[worker]; }

  template <typename Fn>
  void commit(Fn&& fn) const {
    for (const auto& lane : lanes_)
      for (const Record& r : lane) fn(r);
  }

  std::vector<Record> collect() const {
    std::vector<Record> all;
    for (const auto& lane : lanes_) all.insert(all.end(), lane.begin(), lane.end());
    return all;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& lane : lanes_) n += lane.size();
    return n;
  }

  void clear() {
    for (auto& lane : lanes_) lane.clear();
  }

 private:
  std::vector<std::vector<Record>> lanes_;
};

// Fixed pool; run() executes fn(worker_index) on every worker and returns
// once all finished, which is the barrier between stages.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()); }
  void run(const std::function<void(int)>& fn);

 private:
  void worker_main(int index);

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  int remaining_ = 0;
  bool stop_ = false;
};

int hardware_workers();

// Exact replay of one step's MACO updates for a single edge. `positions`
// lists the indices (in ascending decision order) at which this edge was the
// selection; every other index decrements it. Runs of decrements collapse to
// one clamped subtraction, which equals the iterated form in integer
// arithmetic, so the fold is bit-equal to literal sequential application.
TauMicros fold_maco_edge(TauMicros tau, std::span<const std::int32_t> positions,
                         std::int64_t total_decisions,
                         const PheromoneParams& params);

// Runs the same staged step as the sequential engine across a worker pool.
// Output is bit-identical to engine run() for every config (wall clock
// aside): stages are barrier-separated, cross-entity mutations commit in
// ascending entity id, and the pheromone fold uses the same integer
// arithmetic as literal per-decision application. workers <= 0 auto-detects.
RunResult parallel_run(const SimConfig& cfg, int workers);
RunResult parallel_run(const SimConfig& cfg, const DistanceTable& dist, int workers);

}  // namespace macosim
