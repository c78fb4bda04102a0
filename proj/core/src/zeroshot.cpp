#include "trimix/zeroshot.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "trimix/common.hpp"

namespace trimix {

std::string pretty_class_name(const std::string& class_label) {
    std::string out = class_label;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

namespace {

std::string fill_template(const std::string& tmpl, const std::string& class_label) {
    const auto pos = tmpl.find("{}");
    if (pos == std::string::npos) return tmpl + " " + pretty_class_name(class_label);
    std::string out = tmpl;
    out.replace(pos, 2, pretty_class_name(class_label));
    return out;
}

} // namespace

ClassPrototypes build_prototypes(std::span<const std::string> classes,
                                 std::span<const std::string> templates,
                                 const EmbeddingProvider& provider) {
    if (classes.empty()) throw std::invalid_argument("build_prototypes: empty class list");
    if (templates.empty()) throw std::invalid_argument("build_prototypes: empty template list");
    {
        std::set<std::string> unique(classes.begin(), classes.end());
        if (unique.size() != classes.size()) {
            throw std::invalid_argument("build_prototypes: duplicate class names");
        }
    }
    ClassPrototypes out;
    out.classes.assign(classes.begin(), classes.end());
    out.vectors.resize(static_cast<Eigen::Index>(classes.size()), provider.dim());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(provider.dim());
        for (const auto& tmpl : templates) {
            mean += provider.embed_text(fill_template(tmpl, classes[c]));
        }
        mean /= static_cast<double>(templates.size());
        const double n = mean.norm();
        if (!(n > 1e-12)) {
            throw std::runtime_error("build_prototypes: prototype collapsed to zero for class " +
                                     classes[c]);
        }
        out.vectors.row(static_cast<Eigen::Index>(c)) = (mean / n).transpose();
    }
    return out;
}

std::vector<std::pair<std::string, double>> classify(const Eigen::VectorXd& embedding,
                                                     const ClassPrototypes& prototypes) {
    if (embedding.size() != prototypes.vectors.cols()) {
        throw std::invalid_argument("classify: embedding dimension mismatch");
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(prototypes.classes.size());
    const Eigen::VectorXd sims = prototypes.vectors * embedding;
    for (std::size_t c = 0; c < prototypes.classes.size(); ++c) {
        out.emplace_back(prototypes.classes[c], sims[static_cast<Eigen::Index>(c)]);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

double accuracy(std::span<const std::vector<std::string>> ranked_predictions,
                std::span<const std::string> labels, int k, AccuracyMode mode) {
    if (ranked_predictions.empty() || ranked_predictions.size() != labels.size()) {
        throw std::invalid_argument("accuracy: empty or mismatched predictions/labels");
    }
    if (k < 1) throw std::invalid_argument("accuracy: k must be >= 1");

    const auto hit = [&](std::size_t i) {
        const auto& ranked = ranked_predictions[i];
        const std::size_t upto = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
        for (std::size_t r = 0; r < upto; ++r) {
            if (ranked[r] == labels[i]) return true;
        }
        return false;
    };

    if (mode == AccuracyMode::ObjectWise) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (hit(i)) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(labels.size());
    }

    std::map<std::string, std::pair<std::size_t, std::size_t>> per_class; // correct, total
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& [correct, total] = per_class[labels[i]];
        ++total;
        if (hit(i)) ++correct;
    }
    double sum = 0.0;
    for (const auto& [cls, ct] : per_class) {
        (void)cls;
        sum += static_cast<double>(ct.first) / static_cast<double>(ct.second);
    }
    return sum / static_cast<double>(per_class.size());
}

std::vector<FeatureRow> export_features(std::span<const Triplet> records,
                                        const ToyEncoderParams& params,
                                        std::size_t min_points_exclusive) {
    std::vector<FeatureRow> out;
    std::set<std::pair<std::string, double>> seen;
    for (const auto& t : records) {
        if (!seen.insert({t.instance_id, t.t0}).second) continue;
        if (t.points.size() <= min_points_exclusive) continue;
        std::vector<Eigen::Vector3d> cloud;
        cloud.reserve(t.points.size());
        for (const auto& p : t.points) cloud.push_back(p.cast<double>());
        out.push_back({t.instance_id, t.class_label, encode_points(params, cloud)});
    }
    return out;
}

std::vector<RetrievalHit> retrieve(const std::string& prompt, std::span<const Triplet> records,
                                   const ToyEncoderParams& params,
                                   const EmbeddingProvider& provider, std::size_t top_n) {
    const Eigen::VectorXd q = provider.embed_text(prompt);
    std::vector<RetrievalHit> hits;
    std::set<std::pair<std::string, double>> seen;
    for (const auto& t : records) {
        if (!seen.insert({t.instance_id, t.t0}).second) continue;
        std::vector<Eigen::Vector3d> cloud;
        cloud.reserve(t.points.size());
        for (const auto& p : t.points) cloud.push_back(p.cast<double>());
        const Eigen::VectorXd e = encode_points(params, cloud);
        hits.push_back({t.instance_id, t.class_label, q.dot(e)});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.instance_id < b.instance_id;
    });
    if (hits.size() > top_n) hits.resize(top_n);
    return hits;
}

std::vector<std::string> load_prompt_templates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prompt file: " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    if (out.empty()) throw IoError("prompt file is empty: " + path.string());
    return out;
}

} // namespace trimix
