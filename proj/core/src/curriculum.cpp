#include "trimix/curriculum.hpp"

#include <cmath>
#include <stdexcept>

#include "trimix/common.hpp"
#include "trimix/rng.hpp"

namespace trimix {

void CurriculumSchedule::validate() const {
    if (warmup_epochs < 0) throw ConfigError("warmup_epochs: must be >= 0");
    if (total_epochs < warmup_epochs) throw ConfigError("total_epochs: must be >= warmup_epochs");
    if (!(max_ratio >= 0.0 && max_ratio <= 1.0)) throw ConfigError("max_ratio: must be in [0, 1]");
    if (!(coverage > 0.0 && coverage < 1.0)) throw ConfigError("coverage: must be in (0, 1)");
    if (batch_size < 1) throw ConfigError("batch_size: must be >= 1");
    if (device_count < 1) throw ConfigError("device_count: must be >= 1");
    if (synthetic_size < 1) throw ConfigError("synthetic_size: must be >= 1");
}

double mixing_ratio(int epoch, const CurriculumSchedule& schedule) {
    schedule.validate();
    if (epoch < 0 || epoch > schedule.total_epochs) {
        throw std::invalid_argument("mixing_ratio: epoch outside [0, total_epochs]");
    }
    if (epoch < schedule.warmup_epochs) return 0.0;
    if (schedule.total_epochs == schedule.warmup_epochs) return schedule.max_ratio;
    return schedule.max_ratio * static_cast<double>(epoch - schedule.warmup_epochs) /
           static_cast<double>(schedule.total_epochs - schedule.warmup_epochs);
}

long long iterations_per_epoch(const CurriculumSchedule& schedule) {
    schedule.validate();
    const double draws_needed =
        static_cast<double>(schedule.synthetic_size) * std::log(1.0 / (1.0 - schedule.coverage));
    const double per_iter = static_cast<double>(schedule.device_count) *
                            static_cast<double>(schedule.batch_size);
    return static_cast<long long>(std::ceil(draws_needed / per_iter));
}

int outdoor_count_per_batch(double ratio, int batch_size) {
    const int k = static_cast<int>(std::floor(ratio * batch_size + 0.5));
    return std::min(std::max(k, 0), batch_size);
}

std::vector<BatchEntry> sample_batch_with_ratio(double ratio, int batch_size, int epoch,
                                                long long iteration, int device,
                                                std::uint64_t seed, std::size_t n_synthetic,
                                                std::size_t n_outdoor) {
    const int outdoor = outdoor_count_per_batch(ratio, batch_size);
    const int synthetic = batch_size - outdoor;
    if (outdoor > 0 && n_outdoor == 0) {
        throw ConfigError("sample_batch: positive outdoor share with an empty outdoor dataset");
    }
    if (synthetic > 0 && n_synthetic == 0) {
        throw ConfigError("sample_batch: positive synthetic share with an empty synthetic dataset");
    }
    Rng rng = Rng(seed)
                  .split("batch")
                  .split(static_cast<std::uint64_t>(device), static_cast<std::uint64_t>(epoch))
                  .split(static_cast<std::uint64_t>(iteration));
    std::vector<BatchEntry> out;
    out.reserve(static_cast<std::size_t>(batch_size));
    for (int i = 0; i < outdoor; ++i) {
        out.push_back({Domain::Outdoor, rng.uniform_index(n_outdoor)});
    }
    for (int i = 0; i < synthetic; ++i) {
        out.push_back({Domain::Synthetic, rng.uniform_index(n_synthetic)});
    }
    return out;
}

std::vector<BatchEntry> sample_batch(const CurriculumSchedule& schedule, int epoch,
                                     long long iteration, int device, std::uint64_t seed,
                                     std::size_t n_synthetic, std::size_t n_outdoor) {
    return sample_batch_with_ratio(mixing_ratio(epoch, schedule), schedule.batch_size, epoch,
                                   iteration, device, seed, n_synthetic, n_outdoor);
}

} // namespace trimix
