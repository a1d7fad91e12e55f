#pragma once

#include <cstdint>
#include <random>

namespace ggmkf {

using Rng = std::mt19937_64;

// Stateless seed mixing (splitmix64 finalizer). Used to derive independent
// per-node / per-replication streams from one master seed so that parallel
// schedules cannot change results.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) {
    return mix_seed(master ^ mix_seed(a));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

} // namespace ggmkf
