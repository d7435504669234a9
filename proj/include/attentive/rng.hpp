#pragma once
#include <cstdint>

namespace attentive {

// splitmix64 finalizer. Bijective on 64-bit words; used to turn structured
// inputs (seed, path index, run index) into well-mixed generator seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1dce4e5bULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream seed for (base, index). Streams for distinct indices
// never depend on iteration order, so work can be sharded across threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Folds a list of indices into one seed, e.g. seed_chain(root, pair, policy, run).
template <typename... Ix>
std::uint64_t seed_chain(std::uint64_t base, Ix... idx) {
    std::uint64_t s = mix64(base);
    ((s = derive_seed(s, static_cast<std::uint64_t>(idx))), ...);
    return s;
}

} // namespace attentive
