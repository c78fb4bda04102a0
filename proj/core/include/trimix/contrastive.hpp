#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trimix/rng.hpp"

namespace trimix {

// ---------------------------------------------------------------------------
// Symmetric InfoNCE over a batch. Rows of anchor/target are unit embeddings;
// the similarity matrix is S = anchor * target^T / tau with the diagonal as
// positives. The loss is the mean of row-wise and column-wise cross-entropy
// (mean over the batch, stated explicitly so oracle values are exact).
// ---------------------------------------------------------------------------

double infonce_symmetric(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& target, double tau);

// Closed-form gradient of infonce_symmetric with respect to the anchor rows.
Eigen::MatrixXd infonce_gradient(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& target,
                                 double tau);

// ---------------------------------------------------------------------------
// Toy permutation-invariant point encoder: per-point affine map + tanh,
// max-pool over points, linear projection, L2 normalization.
// ---------------------------------------------------------------------------

struct ToyEncoderParams {
    Eigen::MatrixXd w1; // hidden x 3
    Eigen::VectorXd b1; // hidden
    Eigen::MatrixXd w2; // dim x hidden
    Eigen::VectorXd b2; // dim

    int hidden() const { return static_cast<int>(w1.rows()); }
    int dim() const { return static_cast<int>(w2.rows()); }
    bool all_finite() const;

    static ToyEncoderParams init(int hidden, int dim, std::uint64_t seed);
};

struct EncoderGrads {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;

    explicit EncoderGrads(const ToyEncoderParams& p);
    void set_zero();
    void scale(double s);
};

Eigen::VectorXd encode_points(const ToyEncoderParams& params,
                              std::span<const Eigen::Vector3d> cloud);

// Forward pass keeping what the backward pass needs. Max-pool ties resolve
// to the lowest point index.
struct EncodeTrace {
    std::vector<int> argmax; // per hidden unit
    Eigen::VectorXd pooled;  // tanh activations after pooling
    Eigen::VectorXd pre_norm;
    double norm = 0.0;
    Eigen::VectorXd embedding;
};

Eigen::VectorXd encode_with_trace(const ToyEncoderParams& params,
                                  std::span<const Eigen::Vector3d> cloud, EncodeTrace& trace);

void encode_backward(const ToyEncoderParams& params, std::span<const Eigen::Vector3d> cloud,
                     const EncodeTrace& trace, const Eigen::VectorXd& d_embedding,
                     EncoderGrads& grads);

// ---------------------------------------------------------------------------
// Frozen reference embedding providers (the CLIP stand-in). Deterministic:
// identical input, identical unit vector.
// ---------------------------------------------------------------------------

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int dim() const = 0;
    virtual Eigen::VectorXd embed_text(const std::string& text) const = 0;
    virtual Eigen::VectorXd embed_image(const std::string& key) const = 0;
};

// Class-anchored unit vectors plus input-hash perturbation: inputs that
// mention a vocabulary word embed near that word's anchor, everything else
// lands on a hash direction. Gives a controllable semantic geometry without
// any learned weights.
class HashProvider final : public EmbeddingProvider {
public:
    HashProvider(int dim, std::uint64_t seed, std::vector<std::string> vocabulary,
                 double text_noise = 0.15, double image_noise = 0.15);

    int dim() const override { return dim_; }
    Eigen::VectorXd embed_text(const std::string& text) const override;
    Eigen::VectorXd embed_image(const std::string& key) const override;
    Eigen::VectorXd anchor(const std::string& word) const;

private:
    Eigen::VectorXd embed(const std::string& input, std::string_view stream, double noise) const;
    int dim_;
    std::uint64_t seed_;
    std::vector<std::string> vocabulary_; // normalized, longest first
    double text_noise_;
    double image_noise_;
};

// Embeddings from a provider file: header (dim, count) then records
// (key string, dim float32 values). Vectors are re-normalized on load.
class FileProvider final : public EmbeddingProvider {
public:
    explicit FileProvider(const std::filesystem::path& path);

    int dim() const override { return dim_; }
    Eigen::VectorXd embed_text(const std::string& text) const override { return lookup(text); }
    Eigen::VectorXd embed_image(const std::string& key) const override { return lookup(key); }

private:
    Eigen::VectorXd lookup(const std::string& key) const;
    int dim_ = 0;
    std::map<std::string, Eigen::VectorXd> table_;
};

void write_provider_file(const std::filesystem::path& path,
                         const std::map<std::string, Eigen::VectorXd>& table);

} // namespace trimix
