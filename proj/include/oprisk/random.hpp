#pragma once

#include <cstdint>
#include <random>

namespace oprisk {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent generator for substream `index` of `seed`. The state depends
// only on the pair, so substreams can be evaluated in any order or thread.
inline Engine substream(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(index ^ 0xd1b54a32d192ed03ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Engine(seq);
}

} // namespace oprisk
