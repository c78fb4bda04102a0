#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace trimix {

// SplitMix64 step; also the mixer used to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic, splittable random stream.
//
// The underlying generator is std::mt19937_64 seeded from a SplitMix64-mixed
// 64-bit value; all derived quantities (uniform doubles, normals, integer
// draws) are built from raw 64-bit outputs in this file, so streams are
// reproducible for a fixed seed independent of the standard library's
// distribution implementations. Substreams are split off by hashing a label
// into the parent seed, never by sharing generator state, so the draw order
// of one stream cannot perturb another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        eng_.seed(splitmix64(s));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in [0, n). Rejection sampling, exact for any n >= 1.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via Box-Muller (the spare value is cached).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Uniform direction on the unit sphere.
    Eigen::Vector3d unit_vector();

    // Derive an independent substream. Splits are pure functions of
    // (parent seed, label); they do not consume parent state.
    Rng split(std::string_view label) const;
    Rng split(std::uint64_t a, std::uint64_t b = 0) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace trimix
