#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace qsmpc {

// splitmix64 step; used for seed mixing and stream derivation.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic random stream. The engine (mt19937_64) and every bounded
// sampler here are fully specified, so a seed pins the whole sequence on
// any platform. Distinct protocol sessions must use independent streams
// obtained with derive(), never a shared one.
class SeededRng {
public:
    explicit SeededRng(uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound), unbiased via rejection.
    uint64_t below(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("SeededRng::below: bound must be positive");
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    int bit() { return static_cast<int>(next_u64() & 1u); }

    // Uniform double in [0, 1) with 53-bit resolution.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Split function: the child stream is a pure function of (seed, tag) and
    // is independent of how much of the parent stream has been consumed.
    //   child_seed = splitmix64(splitmix64(parent_seed) ^ (tag + 1))
    SeededRng derive(uint64_t tag) const {
        return SeededRng(splitmix64(splitmix64(seed_) ^ (tag + 1)));
    }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace qsmpc
