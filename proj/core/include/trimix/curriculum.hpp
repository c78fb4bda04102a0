#pragma once

#include <cstdint>
#include <vector>

#include "trimix/triplet.hpp"

namespace trimix {

// Two-phase curriculum: pure-synthetic warm-up, then a linear ramp of the
// outdoor share up to max_ratio at total_epochs. Iterations per epoch are
// sized so that sampling with replacement covers an expected `coverage`
// fraction of the synthetic set.
struct CurriculumSchedule {
    int warmup_epochs = 1;   // W_e
    int total_epochs = 250;  // T_e
    double max_ratio = 0.30; // r_max
    double coverage = 0.8;   // psi
    int batch_size = 64;     // B, per device
    int device_count = 1;    // N_GPU
    long long synthetic_size = 1; // N_CAD

    void validate() const; // throws ConfigError naming the offending field
};

// r(e): 0 for e < W_e, else r_max * (e - W_e) / (T_e - W_e).
// Throws std::invalid_argument outside [0, T_e].
double mixing_ratio(int epoch, const CurriculumSchedule& schedule);

// ceil(N_CAD * ln(1 / (1 - psi)) / (N_GPU * B)).
long long iterations_per_epoch(const CurriculumSchedule& schedule);

// Outdoor samples per device batch: round-half-up of ratio * B.
int outdoor_count_per_batch(double ratio, int batch_size);

struct BatchEntry {
    Domain domain = Domain::Synthetic;
    std::size_t index = 0;
};

// One device batch: `outdoor_count_per_batch(r(e), B)` outdoor indices plus
// synthetic for the rest, both i.i.d. with replacement. The stream is a pure
// function of (seed, device, epoch, iteration), so batches are reproducible
// under any worker scheduling and can be generated in any order. The sampler
// never reads class labels.
std::vector<BatchEntry> sample_batch(const CurriculumSchedule& schedule, int epoch,
                                     long long iteration, int device, std::uint64_t seed,
                                     std::size_t n_synthetic, std::size_t n_outdoor);

// As above but with an explicit ratio (static mixing and two-step training
// reuse the same sampling path with a constant or switched ratio).
std::vector<BatchEntry> sample_batch_with_ratio(double ratio, int batch_size, int epoch,
                                                long long iteration, int device,
                                                std::uint64_t seed, std::size_t n_synthetic,
                                                std::size_t n_outdoor);

} // namespace trimix
