#ifndef SOCMAP_RNG_HPP
#define SOCMAP_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace socmap {

// All randomized components draw through these helpers so results are
// reproducible across standard library implementations (std::shuffle and
// std::uniform_*_distribution are not portable bit-for-bit).

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Derives a stream seed from a base seed and a stream counter.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

inline uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    return rng() % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform float in [0, 1).
inline float uniform01f(std::mt19937_64& rng) {
    return static_cast<float>(rng() >> 40) * 0x1.0p-24f;
}

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(bounded(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace socmap

#endif
