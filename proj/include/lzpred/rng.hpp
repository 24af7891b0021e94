#pragma once

#include <cstdint>
#include <random>

namespace lzpred {

// Every seeded component draws from this generator; reports record the seed.
using Rng = std::mt19937_64;

// Independent sub-seed for stream `stream` of a run seeded with `master`
// (splitmix64 finalizer over both words).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    std::uint64_t x = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace lzpred
