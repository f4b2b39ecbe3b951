#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tomo {

// splitmix64 finalizer. Stable across platforms; used for all seed derivation.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t bits_of(double x) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    __builtin_memcpy(&u, &x, sizeof(u));
    return u;
}

// Seed derivation rule: fold the task tag and each argument into the base
// seed with splitmix64. Documented in the README; every randomized task
// (phantom trial, noise draw, solver start vector) gets its seed this way.
struct SeedChain {
    std::uint64_t state;

    explicit SeedChain(std::uint64_t base, std::string_view tag)
        : state(splitmix64(base ^ fnv1a64(tag))) {}

    SeedChain& fold(std::uint64_t v) {
        state = splitmix64(state ^ v);
        return *this;
    }
    SeedChain& fold(double v) { return fold(bits_of(v)); }

    std::uint64_t seed() const { return state; }
};

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    return SeedChain(base, tag).seed();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a) {
    return SeedChain(base, tag).fold(a).seed();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a, std::uint64_t b) {
    return SeedChain(base, tag).fold(a).fold(b).seed();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    return SeedChain(base, tag).fold(a).fold(b).fold(c).seed();
}

// Uniform double in [0, 1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

// Uniform integer in [lo, hi] by rejection-free scaling (desk-scale ranges).
inline int uniform_int(std::mt19937_64& gen, int lo, int hi) {
    return lo + static_cast<int>(uniform01(gen) * (hi - lo + 1));
}

}  // namespace tomo
