#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sdwnlab {

// splitmix64 scrambler; used to turn (seed, label) pairs into well-mixed child seeds.
std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over a byte string; stable across platforms, used for seed derivation and
// content hashes in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic RNG wrapper. mt19937_64 output is pinned by the standard, and all
// derived values below avoid std::*_distribution (whose algorithms are
// implementation-defined), so streams are bit-reproducible across compilers.
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform index in [0, n); modulo bias is < 2^-50 for any n we use
    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    bool bernoulli(double p) { return uniform() < p; }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Child-seed derivation: independent streams per pipeline stage from one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

} // namespace sdwnlab
