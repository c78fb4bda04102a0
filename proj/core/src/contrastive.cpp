#include "trimix/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trimix {

namespace {

void check_infonce_args(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& target, double tau) {
    if (anchor.rows() != target.rows() || anchor.cols() != target.cols()) {
        throw std::invalid_argument("infonce: anchor/target shape mismatch");
    }
    if (anchor.rows() < 1) throw std::invalid_argument("infonce: empty batch");
    if (!(tau > 0.0)) throw std::invalid_argument("infonce: tau must be > 0");
}

// Cross-entropy of one softmax row/column with the diagonal as positive,
// written as (max - positive) + log(sum exp(s - max)) so that constant
// similarity rows give exactly log(B).
double cross_entropy(const Eigen::VectorXd& logits, Eigen::Index positive) {
    const double m = logits.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) sum += std::exp(logits[i] - m);
    return (m - logits[positive]) + std::log(sum);
}

} // namespace

double infonce_symmetric(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& target,
                         double tau) {
    check_infonce_args(anchor, target, tau);
    const Eigen::Index b = anchor.rows();
    const Eigen::MatrixXd sim = anchor * target.transpose() / tau;
    // Extended-precision accumulation keeps the constant-matrix case exactly
    // at log(B) after the division.
    long double row_sum = 0.0L, col_sum = 0.0L;
    for (Eigen::Index i = 0; i < b; ++i) {
        row_sum += cross_entropy(sim.row(i), i);
        col_sum += cross_entropy(sim.col(i), i);
    }
    return static_cast<double>((row_sum + col_sum) / (2.0L * static_cast<long double>(b)));
}

Eigen::MatrixXd infonce_gradient(const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& target,
                                 double tau) {
    check_infonce_args(anchor, target, tau);
    const Eigen::Index b = anchor.rows();
    const Eigen::MatrixXd sim = anchor * target.transpose() / tau;

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(b, b);
    for (Eigen::Index i = 0; i < b; ++i) {
        const Eigen::VectorXd row = sim.row(i);
        const double m = row.maxCoeff();
        Eigen::VectorXd p = (row.array() - m).exp();
        p /= p.sum();
        g.row(i) += p.transpose();
    }
    for (Eigen::Index j = 0; j < b; ++j) {
        const Eigen::VectorXd col = sim.col(j);
        const double m = col.maxCoeff();
        Eigen::VectorXd p = (col.array() - m).exp();
        p /= p.sum();
        g.col(j) += p;
    }
    g.diagonal().array() -= 2.0;
    g /= 2.0 * static_cast<double>(b);
    return g * target / tau;
}

bool ToyEncoderParams::all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

ToyEncoderParams ToyEncoderParams::init(int hidden, int dim, std::uint64_t seed) {
    if (hidden < 1 || dim < 1) {
        throw std::invalid_argument("ToyEncoderParams::init: hidden and dim must be >= 1");
    }
    Rng rng = Rng(seed).split("encoder-init");
    ToyEncoderParams p;
    p.w1.resize(hidden, 3);
    p.b1.resize(hidden);
    p.w2.resize(dim, hidden);
    p.b2.resize(dim);
    const double s1 = 0.8;
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (int i = 0; i < hidden; ++i) {
        for (int j = 0; j < 3; ++j) p.w1(i, j) = s1 * rng.normal();
        p.b1(i) = 0.1 * rng.normal();
    }
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < hidden; ++j) p.w2(i, j) = s2 * rng.normal();
        p.b2(i) = 0.0;
    }
    return p;
}

EncoderGrads::EncoderGrads(const ToyEncoderParams& p)
    : w1(Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols())),
      b1(Eigen::VectorXd::Zero(p.b1.size())),
      w2(Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols())),
      b2(Eigen::VectorXd::Zero(p.b2.size())) {}

void EncoderGrads::set_zero() {
    w1.setZero();
    b1.setZero();
    w2.setZero();
    b2.setZero();
}

void EncoderGrads::scale(double s) {
    w1 *= s;
    b1 *= s;
    w2 *= s;
    b2 *= s;
}

Eigen::VectorXd encode_with_trace(const ToyEncoderParams& params,
                                  std::span<const Eigen::Vector3d> cloud, EncodeTrace& trace) {
    if (cloud.empty()) throw std::invalid_argument("encode_points: empty cloud");
    const int h = params.hidden();

    trace.argmax.assign(static_cast<std::size_t>(h), 0);
    trace.pooled = Eigen::VectorXd::Constant(h, -2.0); // tanh range is (-1, 1)
    for (std::size_t pi = 0; pi < cloud.size(); ++pi) {
        const Eigen::VectorXd z = ((params.w1 * cloud[pi]) + params.b1).array().tanh();
        for (int j = 0; j < h; ++j) {
            if (z[j] > trace.pooled[j]) {
                trace.pooled[j] = z[j];
                trace.argmax[static_cast<std::size_t>(j)] = static_cast<int>(pi);
            }
        }
    }
    trace.pre_norm = params.w2 * trace.pooled + params.b2;
    trace.norm = trace.pre_norm.norm();
    if (!(trace.norm > 1e-12)) {
        throw std::runtime_error("encode_points: zero-norm embedding");
    }
    trace.embedding = trace.pre_norm / trace.norm;
    return trace.embedding;
}

Eigen::VectorXd encode_points(const ToyEncoderParams& params,
                              std::span<const Eigen::Vector3d> cloud) {
    EncodeTrace trace;
    return encode_with_trace(params, cloud, trace);
}

void encode_backward(const ToyEncoderParams& params, std::span<const Eigen::Vector3d> cloud,
                     const EncodeTrace& trace, const Eigen::VectorXd& d_embedding,
                     EncoderGrads& grads) {
    // Through normalization: dy = (I - e e^T) de / |y|.
    const Eigen::VectorXd dy =
        (d_embedding - trace.embedding * trace.embedding.dot(d_embedding)) / trace.norm;
    grads.w2 += dy * trace.pooled.transpose();
    grads.b2 += dy;
    const Eigen::VectorXd dg = params.w2.transpose() * dy;
    const int h = params.hidden();
    for (int j = 0; j < h; ++j) {
        // Max-pool routes the gradient to the winning point only.
        const Eigen::Vector3d& p = cloud[static_cast<std::size_t>(trace.argmax[static_cast<std::size_t>(j)])];
        const double da = dg[j] * (1.0 - trace.pooled[j] * trace.pooled[j]);
        grads.w1.row(j) += da * p.transpose();
        grads.b1[j] += da;
    }
}

} // namespace trimix
