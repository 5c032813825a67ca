#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rdo {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

// FNV-1a, used to turn stream names into stable integers.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for a named sub-stream of a master seed. Streams with different names are
/// independent, so adding draws to one component never shifts another component's draws.
constexpr Seed derive_seed(Seed master, std::string_view stream) noexcept {
  return mix64(master ^ mix64(hash_name(stream)));
}

constexpr Seed derive_seed(Seed base, std::uint64_t index) noexcept {
  return mix64(base ^ mix64(index + 0x632be59bd9b4e019ull));
}

inline Engine make_engine(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

}  // namespace rdo
