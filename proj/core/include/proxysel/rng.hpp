#pragma once

#include <cstdint>
#include <random>

namespace proxysel {

/// splitmix64 step; used to derive independent stream seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministically mix a master seed with stream tags (replication index,
/// sample size, purpose id, ...). Distinct tags give independent streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    std::uint64_t s = base;
    splitmix64(s);
    s ^= a * 0xff51afd7ed558ccdULL;
    splitmix64(s);
    s ^= b * 0xc4ceb9fe1a85ec53ULL;
    splitmix64(s);
    s ^= c * 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace proxysel
