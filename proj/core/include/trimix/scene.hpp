#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trimix/geometry.hpp"
#include "trimix/rng.hpp"

namespace trimix {

// ---------------------------------------------------------------------------
// Parametric object templates. An object is centered at its bounding-box
// center; `size` is the full extent (l, w, h) along the object axes.
// ---------------------------------------------------------------------------

enum class TemplateKind { Box, LShape, Cylinder };

struct ObjectTemplate {
    TemplateKind kind = TemplateKind::Box;
    Eigen::Vector3d size{1.0, 1.0, 1.0};

    // Uniform sample on the surface (object frame).
    Eigen::Vector3d sample_surface(Rng& rng) const;
    // Unsigned distance from p (object frame) to the surface.
    double surface_distance(const Eigen::Vector3d& p) const;
    // Half of the bounding-box diagonal.
    double bounding_radius() const { return 0.5 * size.norm(); }
};

const char* template_kind_name(TemplateKind kind);
TemplateKind template_kind_from_name(const std::string& name);

// Toy taxonomy. Shapes are distinct enough that classification is
// non-trivial but learnable at desk scale.
struct ClassSpec {
    std::string name;
    TemplateKind kind;
    Eigen::Vector3d size;
};

const std::vector<ClassSpec>& default_classes();
const ClassSpec* find_class(const std::string& name);

// ---------------------------------------------------------------------------
// Scene data.
// ---------------------------------------------------------------------------

struct PointXYZI {
    float x = 0, y = 0, z = 0, intensity = 0;
    Eigen::Vector3d xyz() const { return {x, y, z}; }
};

// Pinhole camera. The extrinsic maps camera coordinates (x right, y down,
// z forward) into the ego frame.
struct CameraModel {
    double fx = 500, fy = 500, cx = 400, cy = 225;
    int width = 800, height = 450;
    RigidTransform t_ego_cam;
};

struct Sweep {
    double timestamp = 0.0;
    RigidTransform ego_pose;     // T^g_e
    RigidTransform sensor_mount; // T^e_s
    std::vector<PointXYZI> points;

    RigidTransform sensor_to_global() const { return ego_pose.compose(sensor_mount); }
};

struct AnnotatedBox {
    BoxPose pose; // global frame
    double visibility = 1.0;
};

struct Track {
    std::string instance_id;
    std::string class_label;
    std::vector<AnnotatedBox> boxes; // ascending timestamps

    const AnnotatedBox* box_at(double t, double eps = 1e-9) const;
};

struct Scene {
    double annotation_interval = 0.5; // M, seconds
    std::uint64_t seed = 0;
    std::vector<Sweep> sweeps;        // strictly increasing timestamps
    std::vector<CameraModel> cameras;
    std::vector<Track> tracks; // sorted by instance id

    const Track* find_track(const std::string& instance_id) const;
    // Index of the sweep with this timestamp, or -1.
    int sweep_index_at(double t, double eps = 1e-9) const;
};

// Exact motion used to synthesize an object; the oracle for every fusion and
// compensation test.
struct ObjectTruth {
    std::string instance_id;
    std::string class_label;
    ObjectTemplate shape;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    double yaw_rate = 0.0;
    BoxPose pose0; // pose at scene time 0
};

struct CaptionKey {
    std::string instance_id;
    int camera = 0;
    double timestamp = 0.0;
    auto operator<=>(const CaptionKey&) const = default;
};

struct SceneBundle {
    Scene scene;
    std::vector<ObjectTruth> truths;
    std::map<CaptionKey, std::string> captions;
    std::string config_hash;
};

} // namespace trimix
