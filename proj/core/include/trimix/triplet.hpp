#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trimix/camera.hpp"
#include "trimix/scene.hpp"
#include "trimix/sweep_fusion.hpp"

namespace trimix {

enum class Domain : std::uint8_t { Synthetic = 0, Outdoor = 1 };

const char* domain_name(Domain d);

// Image side of a triplet: either a camera crop (outdoor) or a rendered-view
// id (synthetic). The trainer only consumes embeddings, so pixels are not
// stored here.
struct CropRef {
    int camera = -1; // -1 when the reference is a rendered view
    double timestamp = 0.0;
    float u_min = 0, v_min = 0, u_max = 0, v_max = 0;
    float visibility = 1.0f;
    std::string view_id;
};

// One training atom: canonical object points + image reference + caption.
struct Triplet {
    std::string instance_id;
    std::string class_label; // evaluation only
    Domain domain = Domain::Outdoor;
    std::string caption;
    CropRef crop;
    double t0 = 0.0;
    std::uint32_t source_sweeps = 0;
    std::vector<Eigen::Vector3f> points;
};

struct TripletManifest {
    std::string name;
    std::string config_hash;
    std::size_t total = 0;
    // domain name -> class -> count
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    std::string records_file = "records.bin";
    std::uint64_t records_bytes = 0;
};

struct AssembleResult {
    std::vector<Triplet> triplets;
    std::size_t skipped_missing_caption = 0;
};

// One triplet per (cloud, crop) pair that has a caption; crops without a
// caption are skipped and counted.
AssembleResult assemble_triplets(const FusedObjectCloud& cloud, const std::string& class_label,
                                 std::span<const CropCandidate> crops,
                                 const std::map<CaptionKey, std::string>& captions);

// Dataset directory layout: <dir>/manifest.json + <dir>/records.bin
// (little-endian, byte layout in docs/formats.md).
TripletManifest write_dataset(const std::filesystem::path& dir,
                              std::span<const Triplet> triplets, const std::string& name,
                              const std::string& config_hash);

struct Dataset {
    TripletManifest manifest;
    std::vector<Triplet> triplets;
};

Dataset read_dataset(const std::filesystem::path& dir);

// Stable string key identifying a triplet's image reference, used for
// deterministic embedding lookups.
std::string image_embed_key(const Triplet& t);

} // namespace trimix
