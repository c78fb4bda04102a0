#include <doctest.h>

#include <filesystem>
#include <map>

#include "trimix/common.hpp"
#include "trimix/rng.hpp"
#include "trimix/zeroshot.hpp"

using namespace trimix;

namespace {

// Fixed-table provider for exact-arithmetic prototype tests.
class TableProvider final : public EmbeddingProvider {
public:
    TableProvider(int dim, std::map<std::string, Eigen::VectorXd> table)
        : dim_(dim), table_(std::move(table)) {}
    int dim() const override { return dim_; }
    Eigen::VectorXd embed_text(const std::string& text) const override {
        const auto it = table_.find(text);
        if (it == table_.end()) throw std::invalid_argument("no entry: " + text);
        return it->second;
    }
    Eigen::VectorXd embed_image(const std::string& key) const override {
        return embed_text(key);
    }

private:
    int dim_;
    std::map<std::string, Eigen::VectorXd> table_;
};

// Independent brute-force accuracy for the oracle comparison.
double brute_force_accuracy(const std::vector<std::vector<std::string>>& ranked,
                            const std::vector<std::string>& labels, int k, bool class_wise) {
    auto topk_hit = [&](std::size_t i) {
        for (int r = 0; r < k && r < static_cast<int>(ranked[i].size()); ++r) {
            if (ranked[i][static_cast<std::size_t>(r)] == labels[i]) return true;
        }
        return false;
    };
    if (!class_wise) {
        std::size_t ok = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (topk_hit(i)) ++ok;
        }
        return static_cast<double>(ok) / static_cast<double>(labels.size());
    }
    std::map<std::string, std::pair<int, int>> agg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        agg[labels[i]].second += 1;
        if (topk_hit(i)) agg[labels[i]].first += 1;
    }
    double sum = 0.0;
    for (const auto& [cls, c] : agg) {
        (void)cls;
        sum += static_cast<double>(c.first) / static_cast<double>(c.second);
    }
    return sum / static_cast<double>(agg.size());
}

} // namespace

TEST_CASE("build_prototypes: single and duplicate templates") {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
    e1[0] = 1.0;
    std::map<std::string, Eigen::VectorXd> table;
    table["point cloud of car"] = e1;
    const TableProvider provider(4, table);

    const std::vector<std::string> classes = {"car"};
    const std::vector<std::string> one = {"point cloud of {}"};
    const ClassPrototypes p1 = build_prototypes(classes, one, provider);
    CHECK((p1.vectors.row(0).transpose() - e1).norm() == 0.0);

    // Two identical templates behave like one (mean idempotence).
    const std::vector<std::string> two = {"point cloud of {}", "point cloud of {}"};
    const ClassPrototypes p2 = build_prototypes(classes, two, provider);
    CHECK((p2.vectors - p1.vectors).norm() == 0.0);
}

TEST_CASE("build_prototypes: two orthogonal templates average to the diagonal") {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4), e2 = Eigen::VectorXd::Zero(4);
    e1[0] = 1.0;
    e2[1] = 1.0;
    std::map<std::string, Eigen::VectorXd> table;
    table["a car"] = e1;
    table["the car"] = e2;
    const TableProvider provider(4, table);
    const std::vector<std::string> classes = {"car"};
    const std::vector<std::string> templates = {"a {}", "the {}"};
    const ClassPrototypes p = build_prototypes(classes, templates, provider);
    // normalized mean of two orthogonal unit vectors: cosine 1/sqrt(2) to each.
    CHECK(p.vectors.row(0).dot(e1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(p.vectors.row(0).dot(e2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("build_prototypes: empty class list and duplicates are rejected") {
    const TableProvider provider(4, {});
    const std::vector<std::string> templates = {"{}"};
    CHECK_THROWS_AS(build_prototypes({}, templates, provider), std::invalid_argument);
    const std::vector<std::string> dup = {"car", "car"};
    CHECK_THROWS_AS(build_prototypes(dup, templates, provider), std::invalid_argument);
}

TEST_CASE("classify: exact prototype match ranks first with similarity 1") {
    ClassPrototypes protos;
    protos.classes = {"a", "b", "c"};
    protos.vectors = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(3);
    q[1] = 1.0;
    const auto ranked = classify(q, protos);
    CHECK(ranked[0].first == "b");
    CHECK(ranked[0].second == doctest::Approx(1.0));
}

TEST_CASE("classify: all-zero similarities break ties lexicographically") {
    ClassPrototypes protos;
    protos.classes = {"zebra", "apple", "mango"};
    protos.vectors = Eigen::MatrixXd::Zero(3, 4);
    protos.vectors(0, 0) = 1.0;
    protos.vectors(1, 1) = 1.0;
    protos.vectors(2, 2) = 1.0;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(4);
    q[3] = 1.0; // orthogonal to every prototype
    const auto ranked = classify(q, protos);
    CHECK(ranked[0].first == "apple");
    CHECK(ranked[1].first == "mango");
    CHECK(ranked[2].first == "zebra");
    for (const auto& [cls, sim] : ranked) {
        (void)cls;
        CHECK(sim == 0.0);
    }
}

TEST_CASE("classify: dimension mismatch and rescale invariance") {
    ClassPrototypes protos;
    protos.classes = {"a", "b"};
    protos.vectors = Eigen::MatrixXd::Identity(2, 4);
    CHECK_THROWS_AS(classify(Eigen::VectorXd::Zero(3), protos), std::invalid_argument);

    Rng rng(4);
    Eigen::VectorXd q(4);
    for (int i = 0; i < 4; ++i) q[i] = rng.normal();
    q.normalize();
    const auto r1 = classify(q, protos);
    const auto r2 = classify(Eigen::VectorXd(3.7 * q), protos); // argmax-invariant
    CHECK(r1[0].first == r2[0].first);
    CHECK(r1[1].first == r2[1].first);
}

TEST_CASE("accuracy: trivial and hand-counted examples") {
    const std::vector<std::vector<std::string>> ranked = {
        {"car", "truck"}, {"truck", "car"}, {"car", "truck"}};
    const std::vector<std::string> labels = {"car", "truck", "car"};
    CHECK(accuracy(ranked, labels, 1, AccuracyMode::ObjectWise) == 1.0);
    CHECK(accuracy(ranked, labels, 1, AccuracyMode::ClassWise) == 1.0);

    // 2 classes: class A 100 instances all correct, class B 1 instance wrong.
    std::vector<std::vector<std::string>> preds;
    std::vector<std::string> lbls;
    for (int i = 0; i < 100; ++i) {
        preds.push_back({"A", "B"});
        lbls.push_back("A");
    }
    preds.push_back({"A", "B"});
    lbls.push_back("B");
    CHECK(accuracy(preds, lbls, 1, AccuracyMode::ObjectWise) ==
          doctest::Approx(100.0 / 101.0).epsilon(1e-12));
    CHECK(accuracy(preds, lbls, 1, AccuracyMode::ClassWise) == doctest::Approx(0.5));
    // k equal to the number of classes is exhaustive.
    CHECK(accuracy(preds, lbls, 2, AccuracyMode::ObjectWise) == 1.0);
    CHECK(accuracy(preds, lbls, 2, AccuracyMode::ClassWise) == 1.0);

    CHECK_THROWS_AS(accuracy({}, {}, 1, AccuracyMode::ObjectWise), std::invalid_argument);
    CHECK_THROWS_AS(accuracy(preds, lbls, 0, AccuracyMode::ObjectWise), std::invalid_argument);
}

TEST_CASE("accuracy: matches brute force on random prediction tables") {
    Rng rng(6);
    const std::vector<std::string> classes = {"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(60);
        std::vector<std::vector<std::string>> ranked(n);
        std::vector<std::string> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> order = classes;
            for (std::size_t j = order.size() - 1; j > 0; --j) {
                std::swap(order[j], order[rng.uniform_index(j + 1)]);
            }
            ranked[i] = order;
            labels[i] = classes[rng.uniform_index(classes.size())];
        }
        for (int k : {1, 2, 5}) {
            CHECK(accuracy(ranked, labels, k, AccuracyMode::ObjectWise) ==
                  brute_force_accuracy(ranked, labels, k, false));
            CHECK(accuracy(ranked, labels, k, AccuracyMode::ClassWise) ==
                  brute_force_accuracy(ranked, labels, k, true));
        }
    }
}

TEST_CASE("accuracy: top-k monotone, class duplication invariance") {
    Rng rng(8);
    const std::vector<std::string> classes = {"a", "b", "c", "d"};
    std::vector<std::vector<std::string>> ranked;
    std::vector<std::string> labels;
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> order = classes;
        for (std::size_t j = order.size() - 1; j > 0; --j) {
            std::swap(order[j], order[rng.uniform_index(j + 1)]);
        }
        ranked.push_back(order);
        labels.push_back(classes[rng.uniform_index(classes.size())]);
    }
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double acc = accuracy(ranked, labels, k, AccuracyMode::ObjectWise);
        CHECK(acc >= prev);
        prev = acc;
    }

    // Duplicating every instance of one class leaves class-wise accuracy
    // unchanged but shifts object-wise accuracy (unless it was already equal).
    std::vector<std::vector<std::string>> dup_ranked = ranked;
    std::vector<std::string> dup_labels = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == "a") {
            dup_ranked.push_back(ranked[i]);
            dup_labels.push_back(labels[i]);
        }
    }
    CHECK(accuracy(dup_ranked, dup_labels, 1, AccuracyMode::ClassWise) ==
          doctest::Approx(accuracy(ranked, labels, 1, AccuracyMode::ClassWise)).epsilon(1e-12));
}

TEST_CASE("export_features: filtering, dedupe and determinism") {
    const ToyEncoderParams params = ToyEncoderParams::init(16, 8, 5);

    CHECK(export_features({}, params).empty());

    std::vector<Triplet> records;
    Rng rng(10);
    for (int i = 0; i < 6; ++i) {
        Triplet t;
        t.instance_id = "obj-" + std::to_string(i / 2); // duplicate (instance, t0) pairs
        t.t0 = 1.0;
        t.class_label = "car";
        t.caption = "x";
        const int n = i < 4 ? 200 : 100; // last instance too sparse (<= 150)
        for (int p = 0; p < n; ++p) {
            t.points.emplace_back(static_cast<float>(rng.normal()),
                                  static_cast<float>(rng.normal()),
                                  static_cast<float>(rng.normal()));
        }
        records.push_back(std::move(t));
    }
    const auto rows = export_features(records, params);
    // obj-0 and obj-1 pass the >150 filter once each; obj-2 is too sparse.
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].instance_id == "obj-0");
    CHECK(rows[1].instance_id == "obj-1");
    const auto rows2 = export_features(records, params);
    CHECK((rows[0].embedding - rows2[0].embedding).norm() == 0.0);
}

TEST_CASE("retrieve: ranks the matching class first") {
    std::vector<std::string> vocab;
    for (const auto& c : default_classes()) vocab.push_back(c.name);
    const HashProvider provider(16, 42, vocab);
    const ToyEncoderParams params = ToyEncoderParams::init(16, 16, 5);

    // Build records whose encoded embeddings are arbitrary; retrieval just
    // needs deterministic ranking by cosine.
    std::vector<Triplet> records;
    Rng rng(12);
    for (int i = 0; i < 10; ++i) {
        Triplet t;
        t.instance_id = "obj-" + std::to_string(i);
        t.t0 = 0.0;
        t.class_label = i % 2 == 0 ? "car" : "pedestrian";
        t.caption = "x";
        for (int p = 0; p < 50; ++p) {
            t.points.emplace_back(static_cast<float>(rng.normal()),
                                  static_cast<float>(rng.normal()),
                                  static_cast<float>(rng.normal()));
        }
        records.push_back(std::move(t));
    }
    const auto hits = retrieve("point cloud of car", records, params, provider, 5);
    CHECK(hits.size() == 5);
    for (std::size_t i = 1; i < hits.size(); ++i) {
        CHECK(hits[i - 1].similarity >= hits[i].similarity);
    }
}
