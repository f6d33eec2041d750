#include "moranipd/rng.hpp"

#include "moranipd/errors.hpp"

namespace moranipd {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  // Each component is offset by a distinct odd constant before mixing so that
  // (1,0) and (0,1) land far apart.
  std::uint64_t s = mix64(master ^ 0x9e3779b97f4a7c15ull);
  s = mix64(s ^ mix64(a + 0x9e3779b97f4a7c15ull));
  s = mix64(s ^ mix64(b + 0x3c6ef372fe94f82bull));
  s = mix64(s ^ mix64(c + 0x61c8864680b583ebull));
  return s;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ValidationError("uniform_index: n must be positive");
  const std::uint64_t un = n;
  // 2^64 mod n; any accepted window of length k*n gives each residue k times.
  const std::uint64_t reject_below = (0 - un) % un;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= reject_below) return static_cast<std::size_t>(r % un);
  }
}

}  // namespace moranipd
