#pragma once

#include <random>

// Shared deterministic RNG for property tests. Fixed seed keeps runs
// reproducible across machines.
inline std::mt19937& test_rng() {
    static std::mt19937 rng(0x5eed2026u);
    return rng;
}

inline int rand_int(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(test_rng());
}
