#pragma once

#include <span>
#include <string>
#include <vector>

#include "trimix/contrastive.hpp"
#include "trimix/curriculum.hpp"
#include "trimix/triplet.hpp"
#include "trimix/zeroshot.hpp"

namespace trimix {

enum class TrainMode { Curriculum, Static, TwoStep };

const char* train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& name);

struct TrainConfig {
    CurriculumSchedule schedule; // synthetic_size is filled from the data
    TrainMode mode = TrainMode::Curriculum;
    int hidden = 32;
    double tau = 0.07;
    double learning_rate = 0.5; // cosine-decayed to 0 over all steps
    int switch_epoch = -1;      // two-step switch; default total_epochs / 2
    std::uint64_t seed = 1;
    // Outdoor classes withheld from the training split (unseen-class
    // evaluation); they stay in the evaluation split.
    std::vector<std::string> exclude_outdoor_classes;

    void validate() const;
};

struct EpochMetrics {
    int epoch = 0;
    double ratio = 0.0;
    long long iterations = 0;
    double mean_loss = 0.0;
    double synthetic_class_top1 = 0.0;
    double synthetic_object_top1 = 0.0;
    double outdoor_class_top1 = 0.0;
    double outdoor_object_top1 = 0.0;
};

struct TrainResult {
    ToyEncoderParams params;
    std::vector<EpochMetrics> metrics;
};

// Gradient descent on the toy encoder against L = L_P2I + L_P2T over
// curriculum-sampled batches. Image/text embeddings come from the frozen
// provider and are cached up front; only the encoder parameters move. Every
// 5th record (per domain, in dataset order) is held out as the evaluation
// split; per-epoch zero-shot top-1 accuracy on both held-out splits is
// evaluated against single-prompt prototypes. Deterministic for a fixed
// (config, seed).
TrainResult train(const TrainConfig& config, std::span<const Triplet> synthetic,
                  std::span<const Triplet> outdoor, const EmbeddingProvider& provider);

// Encoder parameter file helpers (binary, little-endian; docs/formats.md).
void write_params(const std::filesystem::path& path, const ToyEncoderParams& params);
ToyEncoderParams read_params(const std::filesystem::path& path);

} // namespace trimix
