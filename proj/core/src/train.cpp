#include "trimix/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "trimix/common.hpp"

namespace trimix {

const char* train_mode_name(TrainMode m) {
    switch (m) {
    case TrainMode::Curriculum: return "curriculum";
    case TrainMode::Static: return "static";
    case TrainMode::TwoStep: return "two-step";
    }
    return "curriculum";
}

TrainMode train_mode_from_name(const std::string& name) {
    if (name == "curriculum") return TrainMode::Curriculum;
    if (name == "static") return TrainMode::Static;
    if (name == "two-step" || name == "twostep") return TrainMode::TwoStep;
    throw ConfigError("mode: expected curriculum|static|two-step, got '" + name + "'");
}

void TrainConfig::validate() const {
    if (hidden < 1) throw ConfigError("hidden: must be >= 1");
    if (!(tau > 0.0)) throw ConfigError("tau: must be > 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate: must be > 0");
}

namespace {

struct Record {
    std::vector<Eigen::Vector3d> points;
    Eigen::VectorXd image_emb;
    Eigen::VectorXd text_emb;
    std::string class_label;
    std::string instance_id;
    double t0 = 0.0;
};

struct DomainData {
    std::vector<Record> train;
    std::vector<Record> eval; // deduplicated by (instance, t0)
    std::vector<std::string> classes;
};

DomainData prepare_domain(std::span<const Triplet> triplets, const EmbeddingProvider& provider,
                          const std::vector<std::string>& exclude_from_train) {
    DomainData out;
    std::set<std::string> classes;
    std::set<std::pair<std::string, double>> eval_seen;
    for (std::size_t i = 0; i < triplets.size(); ++i) {
        const Triplet& t = triplets[i];
        classes.insert(t.class_label);
        Record r;
        r.points.reserve(t.points.size());
        for (const auto& p : t.points) r.points.push_back(p.cast<double>());
        r.image_emb = provider.embed_image(image_embed_key(t));
        r.text_emb = provider.embed_text(t.caption);
        r.class_label = t.class_label;
        r.instance_id = t.instance_id;
        r.t0 = t.t0;
        const bool held_out = (i % 5) == 0;
        if (held_out) {
            if (eval_seen.insert({t.instance_id, t.t0}).second) out.eval.push_back(std::move(r));
        } else {
            if (std::find(exclude_from_train.begin(), exclude_from_train.end(), t.class_label) ==
                exclude_from_train.end()) {
                out.train.push_back(std::move(r));
            }
        }
    }
    out.classes.assign(classes.begin(), classes.end());
    return out;
}

struct EvalAccuracy {
    double class_top1 = 0.0;
    double object_top1 = 0.0;
};

EvalAccuracy evaluate_split(const std::vector<Record>& eval, const ToyEncoderParams& params,
                            const ClassPrototypes& prototypes) {
    EvalAccuracy out;
    if (eval.empty()) return out;
    std::vector<std::vector<std::string>> ranked;
    std::vector<std::string> labels;
    ranked.reserve(eval.size());
    labels.reserve(eval.size());
    for (const auto& r : eval) {
        const Eigen::VectorXd e = encode_points(params, r.points);
        std::vector<std::string> names;
        for (const auto& [cls, sim] : classify(e, prototypes)) {
            (void)sim;
            names.push_back(cls);
        }
        ranked.push_back(std::move(names));
        labels.push_back(r.class_label);
    }
    out.class_top1 = accuracy(ranked, labels, 1, AccuracyMode::ClassWise);
    out.object_top1 = accuracy(ranked, labels, 1, AccuracyMode::ObjectWise);
    return out;
}

} // namespace

TrainResult train(const TrainConfig& config, std::span<const Triplet> synthetic,
                  std::span<const Triplet> outdoor, const EmbeddingProvider& provider) {
    config.validate();
    if (synthetic.empty()) throw ConfigError("train: synthetic dataset is empty");

    const DomainData syn = prepare_domain(synthetic, provider, {});
    const DomainData out = prepare_domain(outdoor, provider, config.exclude_outdoor_classes);
    if (syn.train.empty()) throw ConfigError("train: synthetic training split is empty");

    CurriculumSchedule schedule = config.schedule;
    schedule.synthetic_size = static_cast<long long>(syn.train.size());
    schedule.validate();

    const int switch_epoch =
        config.switch_epoch >= 0 ? config.switch_epoch : schedule.total_epochs / 2;

    // Single-prompt prototypes per domain (classes sorted, so deterministic).
    const std::vector<std::string> templates = {kOutdoorPrompt};
    const ClassPrototypes syn_protos =
        syn.classes.empty() ? ClassPrototypes{}
                            : build_prototypes(syn.classes, templates, provider);
    const ClassPrototypes out_protos =
        out.classes.empty() ? ClassPrototypes{}
                            : build_prototypes(out.classes, templates, provider);

    ToyEncoderParams params = ToyEncoderParams::init(config.hidden, provider.dim(), config.seed);
    EncoderGrads grads(params);

    const long long iters = iterations_per_epoch(schedule);
    const long long total_steps =
        std::max<long long>(1, static_cast<long long>(schedule.total_epochs) * iters);

    TrainResult result;
    long long step = 0;
    for (int epoch = 0; epoch < schedule.total_epochs; ++epoch) {
        double ratio = 0.0;
        switch (config.mode) {
        case TrainMode::Curriculum: ratio = mixing_ratio(epoch, schedule); break;
        case TrainMode::Static: ratio = schedule.max_ratio; break;
        case TrainMode::TwoStep: ratio = epoch < switch_epoch ? 0.0 : 1.0; break;
        }

        double loss_sum = 0.0;
        for (long long it = 0; it < iters; ++it) {
            grads.set_zero();
            double iter_loss = 0.0;
            for (int device = 0; device < schedule.device_count; ++device) {
                const auto batch = sample_batch_with_ratio(
                    ratio, schedule.batch_size, epoch, it, device, config.seed, syn.train.size(),
                    out.train.size());
                const auto b = static_cast<Eigen::Index>(batch.size());
                Eigen::MatrixXd anchors(b, provider.dim());
                Eigen::MatrixXd images(b, provider.dim());
                Eigen::MatrixXd texts(b, provider.dim());
                std::vector<EncodeTrace> traces(batch.size());
                std::vector<const Record*> rows(batch.size());
                for (Eigen::Index i = 0; i < b; ++i) {
                    const auto& entry = batch[static_cast<std::size_t>(i)];
                    const Record& r = entry.domain == Domain::Synthetic
                                          ? syn.train[entry.index]
                                          : out.train[entry.index];
                    rows[static_cast<std::size_t>(i)] = &r;
                    anchors.row(i) =
                        encode_with_trace(params, r.points, traces[static_cast<std::size_t>(i)])
                            .transpose();
                    images.row(i) = r.image_emb.transpose();
                    texts.row(i) = r.text_emb.transpose();
                }
                iter_loss += infonce_symmetric(anchors, images, config.tau) +
                             infonce_symmetric(anchors, texts, config.tau);
                const Eigen::MatrixXd danchor = infonce_gradient(anchors, images, config.tau) +
                                                infonce_gradient(anchors, texts, config.tau);
                for (Eigen::Index i = 0; i < b; ++i) {
                    encode_backward(params, rows[static_cast<std::size_t>(i)]->points,
                                    traces[static_cast<std::size_t>(i)], danchor.row(i).transpose(),
                                    grads);
                }
            }
            grads.scale(1.0 / static_cast<double>(schedule.device_count));
            const double lr =
                config.learning_rate * 0.5 *
                (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) /
                                static_cast<double>(total_steps)));
            params.w1 -= lr * grads.w1;
            params.b1 -= lr * grads.b1;
            params.w2 -= lr * grads.w2;
            params.b2 -= lr * grads.b2;
            loss_sum += iter_loss / static_cast<double>(schedule.device_count);
            ++step;
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.ratio = ratio;
        m.iterations = iters;
        m.mean_loss = iters > 0 ? loss_sum / static_cast<double>(iters) : 0.0;
        if (!syn.eval.empty() && !syn_protos.classes.empty()) {
            const auto acc = evaluate_split(syn.eval, params, syn_protos);
            m.synthetic_class_top1 = acc.class_top1;
            m.synthetic_object_top1 = acc.object_top1;
        }
        if (!out.eval.empty() && !out_protos.classes.empty()) {
            const auto acc = evaluate_split(out.eval, params, out_protos);
            m.outdoor_class_top1 = acc.class_top1;
            m.outdoor_object_top1 = acc.object_top1;
        }
        result.metrics.push_back(m);
    }
    result.params = std::move(params);
    return result;
}

void write_params(const std::filesystem::path& path, const ToyEncoderParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const char magic[4] = {'T', 'M', 'X', 'P'};
    out.write(magic, 4);
    const std::uint32_t version = 1;
    const auto hidden = static_cast<std::uint32_t>(params.hidden());
    const auto dim = static_cast<std::uint32_t>(params.dim());
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&hidden), sizeof(hidden));
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    const auto write_mat = [&](const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                const double v = m(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
        }
    };
    write_mat(params.w1);
    write_mat(params.b1);
    write_mat(params.w2);
    write_mat(params.b2);
    if (!out) throw IoError("write failed: " + path.string());
}

ToyEncoderParams read_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "TMXP") {
        throw IoError("bad parameter file magic: " + path.string());
    }
    std::uint32_t version = 0, hidden = 0, dim = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&hidden), sizeof(hidden));
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in || version != 1 || hidden == 0 || dim == 0) {
        throw IoError("bad parameter file header: " + path.string());
    }
    ToyEncoderParams p;
    p.w1.resize(hidden, 3);
    p.b1.resize(hidden);
    p.w2.resize(dim, hidden);
    p.b2.resize(dim);
    const auto read_mat = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                double v = 0.0;
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                m(r, c) = v;
            }
        }
    };
    read_mat(p.w1);
    Eigen::MatrixXd b1(hidden, 1), b2(dim, 1);
    read_mat(b1);
    read_mat(p.w2);
    read_mat(b2);
    p.b1 = b1.col(0);
    p.b2 = b2.col(0);
    if (!in) throw IoError("truncated parameter file: " + path.string());
    return p;
}

} // namespace trimix
