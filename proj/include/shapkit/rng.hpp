#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace shapkit {

// Stable sub-seed derivation: every randomized component hashes
// (master seed, component name, index) so adding a consumer never
// shifts another component's stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(master);
    for (char c : tag) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    }
    return splitmix64(h ^ index);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view tag,
                                std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(master, tag, index));
}

}  // namespace shapkit
