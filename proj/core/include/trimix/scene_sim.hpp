#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trimix/scene.hpp"

namespace trimix {

// Synthetic driving-scene generator configuration. Every scene is a pure
// function of (config, seed): identical inputs produce byte-identical files.
struct SceneConfig {
    int num_objects = 6;
    int num_sweeps = 10;
    double sweep_dt = 0.1;          // seconds between sweeps
    int sweeps_per_annotation = 5;  // M = sweep_dt * sweeps_per_annotation
    int num_cameras = 2;
    int image_width = 800;
    int image_height = 450;
    double focal_px = 500.0;
    double range_noise_sigma = 0.02; // per-point range noise, meters
    int points_per_object = 400;     // per sweep, before dropout
    int clutter_points = 0;          // ground points per sweep
    double clutter_radius = 40.0;
    double speed_min = 0.0; // object speed range, m/s
    double speed_max = 5.0;
    double yaw_rate_max = 0.0;         // rad/s; keep |yaw_rate| * M < pi
    double dropout_ref_distance = 0.0; // keep prob = min(1, ref/dist); 0 disables
    double ego_speed = 0.0;            // ego drives along +x
    double place_min_radius = 8.0;     // object placement annulus
    double place_max_radius = 25.0;
    double place_bearing_deg = 50.0;   // within +/- this of the ego heading
    bool random_visibility = false;    // otherwise every annotation has visibility 1
    std::vector<std::string> classes;  // empty = full default taxonomy
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError naming the offending field
    std::string canonical_json() const;
    std::string hash() const;
};

SceneBundle generate_scene(const SceneConfig& config);

// Procedural stand-in for an RGB crop: a deterministic pixel buffer keyed by
// the instance class.
struct ImageCrop {
    int u0 = 0, v0 = 0;
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb; // width*height*3
};

ImageCrop render_crop_stub(const Scene& scene, const std::string& instance_id, int camera_index,
                           double t, double min_visibility = 0.4);

// ---------------------------------------------------------------------------
// CAD-domain stand-in: clean, dense, canonical object clouds.
// ---------------------------------------------------------------------------

struct SyntheticCloudConfig {
    int count = 500;
    int points_per_cloud = 256;
    int views_per_object = 2; // rendered-view ids per object
    double size_jitter = 0.1;
    std::vector<std::string> classes; // empty = full default taxonomy
    std::uint64_t seed = 1;

    void validate() const;
    std::string canonical_json() const;
    std::string hash() const;
};

struct SyntheticObject {
    std::string object_id;
    std::string class_label;
    // Unit-normalized cloud: centered on the bounding-box center, scaled so
    // the largest half extent is 1 (CAD convention).
    std::vector<Eigen::Vector3d> points;
    std::vector<std::string> view_ids;
    std::string caption;
};

std::vector<SyntheticObject> generate_synthetic_objects(const SyntheticCloudConfig& config);

std::string caption_for_class(const std::string& class_label);

} // namespace trimix
