#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace matchprior {

// splitmix64 finalizer, used to derive well-separated 64-bit seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed-derivation scheme for replicate streams: replicate i draws from a
// fresh mt19937_64 seeded with splitmix64(master ^ splitmix64(i+1)). The
// double mix decorrelates nearby master seeds and nearby indices, so the
// streams are independent of worker count and scheduling.
inline std::uint64_t replicate_seed(std::uint64_t master_seed,
                                    std::uint64_t replicate_index) {
    return splitmix64(master_seed ^ splitmix64(replicate_index + 1));
}

// Deterministic random source. Variates are drawn with hand-rolled
// transforms on top of the engine's standardized 64-bit output, so a seed
// reproduces the same dataset on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Exponential with the given mean (inverse CDF; 1-u keeps log away
    // from zero).
    double exponential(double mean) {
        return -mean * std::log(1.0 - uniform01());
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace matchprior
