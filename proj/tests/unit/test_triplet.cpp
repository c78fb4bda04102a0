#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "trimix/common.hpp"
#include "trimix/rng.hpp"
#include "trimix/triplet.hpp"

using namespace trimix;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("trimix-ds-" + hex64(Rng(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

FusedObjectCloud demo_cloud(int n = 8) {
    FusedObjectCloud c;
    c.instance_id = "obj-0";
    c.t0 = 0.9;
    c.source_sweep_count = 10;
    Rng rng(2);
    for (int i = 0; i < n; ++i) {
        c.points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
    return c;
}

CropCandidate demo_crop(int cam, double t) {
    CropCandidate crop;
    crop.instance_id = "obj-0";
    crop.camera_index = cam;
    crop.timestamp = t;
    crop.u_min = 10;
    crop.v_min = 20;
    crop.u_max = 30;
    crop.v_max = 40;
    crop.visibility = 1.0;
    return crop;
}

std::vector<Triplet> random_triplets(std::size_t n, Rng& rng) {
    std::vector<Triplet> out;
    for (std::size_t i = 0; i < n; ++i) {
        Triplet t;
        t.instance_id = "inst-" + std::to_string(rng.uniform_index(50));
        t.class_label = i % 2 == 0 ? "car" : "pedestrian";
        t.domain = i % 3 == 0 ? Domain::Synthetic : Domain::Outdoor;
        t.caption = "a point cloud of a thing " + std::to_string(i);
        t.crop.camera = static_cast<int>(rng.uniform_index(4)) - 1;
        t.crop.timestamp = rng.uniform(0, 10);
        t.crop.u_min = static_cast<float>(rng.uniform(0, 100));
        t.crop.visibility = static_cast<float>(rng.uniform());
        t.crop.view_id = t.domain == Domain::Synthetic ? "render:x:" + std::to_string(i) : "";
        t.t0 = rng.uniform(0, 5);
        t.source_sweeps = static_cast<std::uint32_t>(rng.uniform_index(11));
        const std::size_t pts = 1 + rng.uniform_index(40);
        for (std::size_t p = 0; p < pts; ++p) {
            t.points.emplace_back(static_cast<float>(rng.normal()),
                                  static_cast<float>(rng.normal()),
                                  static_cast<float>(rng.normal()));
        }
        out.push_back(std::move(t));
    }
    return out;
}

bool triplets_equal(const Triplet& a, const Triplet& b) {
    if (a.instance_id != b.instance_id || a.class_label != b.class_label ||
        a.domain != b.domain || a.caption != b.caption || a.crop.camera != b.crop.camera ||
        a.crop.timestamp != b.crop.timestamp || a.crop.view_id != b.crop.view_id ||
        a.t0 != b.t0 || a.source_sweeps != b.source_sweeps ||
        a.points.size() != b.points.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        // bit-exact float round trip
        if (a.points[i].x() != b.points[i].x() || a.points[i].y() != b.points[i].y() ||
            a.points[i].z() != b.points[i].z()) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("assemble_triplets: one triplet per captioned crop") {
    const FusedObjectCloud cloud = demo_cloud();
    std::map<CaptionKey, std::string> captions;
    std::vector<CropCandidate> crops;
    for (int i = 0; i < 3; ++i) {
        crops.push_back(demo_crop(i, 0.5));
        captions[{"obj-0", i, 0.5}] = "a point cloud of a car";
    }
    const auto res = assemble_triplets(cloud, "car", crops, captions);
    CHECK(res.triplets.size() == 3);
    CHECK(res.skipped_missing_caption == 0);
    for (const auto& t : res.triplets) {
        CHECK(t.domain == Domain::Outdoor);
        CHECK(t.points.size() == cloud.points.size());
        CHECK(t.t0 == cloud.t0);
    }
}

TEST_CASE("assemble_triplets: no crops, no triplets") {
    const auto res = assemble_triplets(demo_cloud(), "car", {}, {});
    CHECK(res.triplets.empty());
    CHECK(res.skipped_missing_caption == 0);
}

TEST_CASE("assemble_triplets: crop without caption is skipped and counted") {
    const FusedObjectCloud cloud = demo_cloud();
    std::map<CaptionKey, std::string> captions;
    captions[{"obj-0", 0, 0.5}] = "a point cloud of a car";
    const std::vector<CropCandidate> crops = {demo_crop(0, 0.5), demo_crop(1, 0.5)};
    const auto res = assemble_triplets(cloud, "car", crops, captions);
    CHECK(res.triplets.size() == 1);
    CHECK(res.skipped_missing_caption == 1);
}

TEST_CASE("dataset: empty round trip") {
    TempDir tmp;
    write_dataset(tmp.path, {}, "empty", "abc");
    const Dataset ds = read_dataset(tmp.path);
    CHECK(ds.triplets.empty());
    CHECK(ds.manifest.total == 0);
    CHECK(ds.manifest.name == "empty");
    CHECK(ds.manifest.config_hash == "abc");
}

TEST_CASE("dataset: 1000 mixed-domain triplets round trip losslessly") {
    TempDir tmp;
    Rng rng(33);
    const auto triplets = random_triplets(1000, rng);
    const TripletManifest manifest = write_dataset(tmp.path, triplets, "mixed", "deadbeef");
    CHECK(manifest.total == 1000);

    const Dataset ds = read_dataset(tmp.path);
    REQUIRE(ds.triplets.size() == triplets.size());
    for (std::size_t i = 0; i < triplets.size(); ++i) {
        CHECK(triplets_equal(triplets[i], ds.triplets[i]));
    }

    // Manifest counts are authoritative: enumeration matches counts.
    std::map<std::string, std::map<std::string, std::size_t>> recount;
    for (const auto& t : ds.triplets) recount[domain_name(t.domain)][t.class_label] += 1;
    CHECK(recount == ds.manifest.counts);
}

TEST_CASE("dataset: truncated records file reports a byte offset") {
    TempDir tmp;
    Rng rng(35);
    write_dataset(tmp.path, random_triplets(20, rng), "trunc", "1");
    const auto rec_path = tmp.path / "records.bin";
    const auto size = fs::file_size(rec_path);
    fs::resize_file(rec_path, size - 7);
    // Manifest byte count no longer matches -> offset-bearing corruption error.
    try {
        read_dataset(tmp.path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
}

TEST_CASE("dataset: corrupt record payload reports a byte offset") {
    TempDir tmp;
    Rng rng(36);
    write_dataset(tmp.path, random_triplets(5, rng), "corrupt", "1");
    const auto rec_path = tmp.path / "records.bin";
    // Overwrite the first record length with a huge value, keeping file size.
    std::fstream f(rec_path, std::ios::binary | std::ios::in | std::ios::out);
    const std::uint32_t bogus = 0x7fffffff;
    f.write(reinterpret_cast<const char*>(&bogus), sizeof(bogus));
    f.close();
    try {
        read_dataset(tmp.path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("byte offset 0") != std::string::npos);
    }
}

TEST_CASE("dataset: missing manifest raises IoError") {
    CHECK_THROWS_AS(read_dataset("/nonexistent/trimix-dataset"), IoError);
}

TEST_CASE("image_embed_key: distinct per view and per crop") {
    Triplet syn;
    syn.domain = Domain::Synthetic;
    syn.class_label = "car";
    syn.crop.view_id = "render:cad-1:0";
    Triplet syn2 = syn;
    syn2.crop.view_id = "render:cad-1:1";
    CHECK(image_embed_key(syn) != image_embed_key(syn2));

    Triplet out;
    out.domain = Domain::Outdoor;
    out.class_label = "car";
    out.instance_id = "obj-3";
    out.crop.camera = 1;
    out.crop.timestamp = 0.5;
    Triplet out2 = out;
    out2.crop.camera = 0;
    CHECK(image_embed_key(out) != image_embed_key(out2));
    // Keys mention the class so a frozen image encoder can anchor on it.
    CHECK(image_embed_key(out).find("car") != std::string::npos);
}
