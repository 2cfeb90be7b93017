#pragma once

#include <cstdint>

// Counter-based random draws. Every draw is a pure function of a seed plus
// up to three stream identifiers (entity id, step, purpose), so results do
// not depend on call order, thread scheduling, or worker count.
namespace macosim::rng {

// Purpose tags keep independent uses of the same (seed, entity, step)
// triple from colliding.
enum class Stream : std::uint64_t {
  PheromoneInit = 0x01,
  SpawnPair = 0x02,
  SpawnSpeed = 0x03,
  SpawnDepart = 0x04,
  AcoChoice = 0x05,
  NetGen = 0x06,
};

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t draw(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

constexpr std::uint64_t draw(std::uint64_t seed, Stream s, std::uint64_t a = 0,
                             std::uint64_t b = 0) {
  return draw(seed, static_cast<std::uint64_t>(s), a, b);
}

// Uniform double in [0, 1) with 53 significant bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double uniform(std::uint64_t bits, double lo, double hi) {
  return lo + to_unit(bits) * (hi - lo);
}

// Integer in [0, n) via the 128-bit multiply trick (no modulo bias worth
// caring about at simulation scale).
constexpr std::uint64_t below(std::uint64_t bits, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace macosim::rng
