#include "macosim/pheromone.hpp"

#include <algorithm>

#include "macosim/rng.hpp"

namespace macosim {

void PheromoneParams::validate() const {
  if (!(tau_min <= tau_init_lo && tau_init_lo <= tau_init_hi &&
        tau_init_hi <= tau_max))
    throw ValidationError("pheromone init range must satisfy "
                          "tau_min <= lo <= hi <= tau_max");
  if (delta_inc <= 0 || delta_dec <= 0)
    throw ValidationError("pheromone delta_inc and delta_dec must be positive");
  if (rho < 0 || rho >= 1)
    throw ValidationError("pheromone rho must lie in [0, 1)");
  if (tau_min < 0) throw ValidationError("pheromone tau_min must be >= 0");
}

PheromoneField init_random(const RoadNetwork& net, const PheromoneParams& params,
                           std::uint64_t seed) {
  params.validate();
  std::vector<TauMicros> tau(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    double v = rng::uniform(rng::draw(seed, rng::Stream::PheromoneInit,
                                      static_cast<std::uint64_t>(e)),
                            params.tau_init_lo, params.tau_init_hi);
    tau[e] = std::clamp(tau_from_double(v), params.min_u(), params.max_u());
  }
  return PheromoneField(std::move(tau));
}

void apply_maco_update(std::vector<TauMicros>& tau, EdgeId chosen,
                       const PheromoneParams& params) {
  if (chosen < 0 || chosen >= static_cast<EdgeId>(tau.size()))
    throw ValidationError("maco_update: invalid edge id " + std::to_string(chosen));
  const TauMicros lo = params.min_u(), hi = params.max_u();
  const TauMicros inc = params.inc_u(), dec = params.dec_u();
  for (EdgeId e = 0; e < static_cast<EdgeId>(tau.size()); ++e) {
    if (e == chosen)
      tau[e] = std::min(tau[e] + inc, hi);
    else
      tau[e] = std::max(tau[e] - dec, lo);
  }
}

void apply_maco_update_scoped(std::vector<TauMicros>& tau, EdgeId chosen,
                              std::span<const OutEdge> siblings,
                              const PheromoneParams& params) {
  if (chosen < 0 || chosen >= static_cast<EdgeId>(tau.size()))
    throw ValidationError("maco_update: invalid edge id " + std::to_string(chosen));
  const TauMicros lo = params.min_u(), hi = params.max_u();
  tau[chosen] = std::min(tau[chosen] + params.inc_u(), hi);
  for (const OutEdge& oe : siblings) {
    if (oe.edge == chosen) continue;
    tau[oe.edge] = std::max(tau[oe.edge] - params.dec_u(), lo);
  }
}

TauMicros evaporate_one(TauMicros tau, const PheromoneParams& params) {
  // floor keeps repeated evaporation strictly decreasing until the clamp,
  // so fields reach tau_min exactly.
  auto scaled = static_cast<TauMicros>(
      std::floor((1.0 - params.rho) * static_cast<double>(tau)));
  return std::max(params.min_u(), scaled);
}

void apply_evaporate(std::vector<TauMicros>& tau, const PheromoneParams& params) {
  for (TauMicros& t : tau) t = evaporate_one(t, params);
}

TauMicros deposit_amount(LengthMm path_length_mm, const PheromoneParams& params) {
  if (path_length_mm <= 0)
    throw ValidationError("aco_deposit: nonpositive path length");
  const double length_km = static_cast<double>(path_length_mm) / 1e6;
  return tau_from_double(params.aco_deposit_q / length_km);
}

void apply_aco_deposit(std::vector<TauMicros>& tau, std::span<const EdgeId> path,
                       LengthMm path_length_mm, const PheromoneParams& params) {
  if (path.empty()) return;
  const TauMicros amount = deposit_amount(path_length_mm, params);
  const TauMicros hi = params.max_u();
  for (EdgeId e : path) {
    if (e < 0 || e >= static_cast<EdgeId>(tau.size()))
      throw ValidationError("aco_deposit: invalid edge id " + std::to_string(e));
    tau[e] = std::min(tau[e] + amount, hi);
  }
}

PheromoneField maco_update(const PheromoneField& field, EdgeId chosen,
                           const PheromoneParams& params) {
  std::vector<TauMicros> tau(field.levels().begin(), field.levels().end());
  apply_maco_update(tau, chosen, params);
  return PheromoneField(std::move(tau));
}

PheromoneField evaporate(const PheromoneField& field, const PheromoneParams& params) {
  std::vector<TauMicros> tau(field.levels().begin(), field.levels().end());
  apply_evaporate(tau, params);
  return PheromoneField(std::move(tau));
}

PheromoneField aco_deposit(const PheromoneField& field, std::span<const EdgeId> path,
                           LengthMm path_length_mm, const PheromoneParams& params) {
  std::vector<TauMicros> tau(field.levels().begin(), field.levels().end());
  apply_aco_deposit(tau, path, path_length_mm, params);
  return PheromoneField(std::move(tau));
}

void write_field_csv(const PheromoneField& field, std::ostream& out) {
  out << "edge_id,tau\n";
  for (EdgeId e = 0; e < field.size(); ++e)
    out << e << "," << field.value(e) << "\n";
}

}  // namespace macosim
