#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "macosim/net.hpp"

namespace macosim {

// Pheromone levels are fixed-point integers in micro-units (1e-6). Integer
// arithmetic makes the staged commit in the parallel executor bit-equal to
// literal sequential application, clamps included.
using TauMicros = std::int64_t;

inline constexpr double kTauScale = 1e6;

inline TauMicros tau_from_double(double v) { return std::llround(v * kTauScale); }
inline double tau_to_double(TauMicros v) { return static_cast<double>(v) / kTauScale; }

struct PheromoneParams {
  double tau_init_lo = 1.0;
  double tau_init_hi = 10.0;
  double delta_inc = 1.0;    // MACO increment on the selected edge
  double delta_dec = 0.05;   // MACO decrement on the others
  double rho = 0.1;          // evaporation rate per step, in [0, 1)
  double tau_min = 0.0;
  double tau_max = 100.0;
  double aco_deposit_q = 100.0;
  // When set, the MACO decrement applies only to the sibling out-edges of
  // the decision node instead of the whole network.
  bool decrement_siblings_only = false;

  TauMicros inc_u() const { return tau_from_double(delta_inc); }
  TauMicros dec_u() const { return tau_from_double(delta_dec); }
  TauMicros min_u() const { return tau_from_double(tau_min); }
  TauMicros max_u() const { return tau_from_double(tau_max); }

  void validate() const;
};

class PheromoneField {
 public:
  PheromoneField() = default;
  explicit PheromoneField(std::vector<TauMicros> tau) : tau_(std::move(tau)) {}

  int size() const { return static_cast<int>(tau_.size()); }
  TauMicros level(EdgeId e) const { return tau_.at(e); }
  double value(EdgeId e) const { return tau_to_double(tau_.at(e)); }
  std::span<const TauMicros> levels() const { return tau_; }
  std::vector<TauMicros>& raw() { return tau_; }

  bool operator==(const PheromoneField&) const = default;

 private:
  std::vector<TauMicros> tau_;
};

// One level per edge, i.i.d. uniform on [tau_init_lo, tau_init_hi], keyed by
// (seed, edge id); identical output for identical inputs.
PheromoneField init_random(const RoadNetwork& net, const PheromoneParams& params,
                           std::uint64_t seed);

// Selected edge gains delta_inc (clamped to tau_max); every other edge loses
// delta_dec (clamped to tau_min).
PheromoneField maco_update(const PheromoneField& field, EdgeId chosen,
                           const PheromoneParams& params);

// tau <- max(tau_min, (1 - rho) * tau) on every edge.
PheromoneField evaporate(const PheromoneField& field, const PheromoneParams& params);

// Classic deposit: every path edge gains aco_deposit_q / path_length_km,
// clamped to tau_max. Empty path is a no-op.
PheromoneField aco_deposit(const PheromoneField& field, std::span<const EdgeId> path,
                           LengthMm path_length_mm, const PheromoneParams& params);

// In-place versions used by the executors; the pure operations above wrap
// these over a copy.
void apply_maco_update(std::vector<TauMicros>& tau, EdgeId chosen,
                       const PheromoneParams& params);
void apply_maco_update_scoped(std::vector<TauMicros>& tau, EdgeId chosen,
                              std::span<const OutEdge> siblings,
                              const PheromoneParams& params);
void apply_evaporate(std::vector<TauMicros>& tau, const PheromoneParams& params);
void apply_aco_deposit(std::vector<TauMicros>& tau, std::span<const EdgeId> path,
                       LengthMm path_length_mm, const PheromoneParams& params);

// Evaporation step for a single level, shared by both executors.
TauMicros evaporate_one(TauMicros tau, const PheromoneParams& params);

// Deposit amount for one completed trip.
TauMicros deposit_amount(LengthMm path_length_mm, const PheromoneParams& params);

// Debug snapshot, "edge_id,tau" per line.
void write_field_csv(const PheromoneField& field, std::ostream& out);

}  // namespace macosim
