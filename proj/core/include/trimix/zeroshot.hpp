#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "trimix/contrastive.hpp"
#include "trimix/triplet.hpp"

namespace trimix {

// One unit prototype per class: mean of the per-template text embeddings,
// re-normalized.
struct ClassPrototypes {
    std::vector<std::string> classes;
    Eigen::MatrixXd vectors; // one row per class, unit norm
};

// Human-readable form used inside prompts ("traffic_cone" -> "traffic cone").
std::string pretty_class_name(const std::string& class_label);

// `templates` contain a "{}" placeholder for the class name.
ClassPrototypes build_prototypes(std::span<const std::string> classes,
                                 std::span<const std::string> templates,
                                 const EmbeddingProvider& provider);

// Classes ranked by descending cosine; exact ties break lexicographically.
std::vector<std::pair<std::string, double>> classify(const Eigen::VectorXd& embedding,
                                                     const ClassPrototypes& prototypes);

enum class AccuracyMode { ObjectWise, ClassWise };

// Object-wise: fraction of instances whose label appears in the top k.
// Class-wise: unweighted mean of per-class top-k accuracy over the classes
// present in `labels` (absent classes are excluded).
double accuracy(std::span<const std::vector<std::string>> ranked_predictions,
                std::span<const std::string> labels, int k, AccuracyMode mode);

struct FeatureRow {
    std::string instance_id;
    std::string class_label;
    Eigen::VectorXd embedding;
};

// Encode one row per distinct (instance, t0) cloud with more than
// `min_points_exclusive` points.
std::vector<FeatureRow> export_features(std::span<const Triplet> records,
                                        const ToyEncoderParams& params,
                                        std::size_t min_points_exclusive = 150);

struct RetrievalHit {
    std::string instance_id;
    std::string class_label;
    double similarity = 0.0;
};

// Top-n records by cosine between the prompt embedding and the encoded clouds.
std::vector<RetrievalHit> retrieve(const std::string& prompt, std::span<const Triplet> records,
                                   const ToyEncoderParams& params,
                                   const EmbeddingProvider& provider, std::size_t top_n);

// The 64-prompt protocol file: one template per line, "{}" as placeholder.
std::vector<std::string> load_prompt_templates(const std::filesystem::path& path);

inline const std::string kOutdoorPrompt = "point cloud of {}";

} // namespace trimix
