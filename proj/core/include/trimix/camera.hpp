#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trimix/geometry.hpp"
#include "trimix/scene.hpp"

namespace trimix {

// A 2D crop proposal for one (instance, camera, timestamp). The AABB is the
// tight bound of the 8 projected box corners, in sub-pixel coordinates.
struct CropCandidate {
    std::string instance_id;
    int camera_index = 0;
    double timestamp = 0.0;
    double u_min = 0.0, v_min = 0.0, u_max = 0.0, v_max = 0.0;
    double visibility = 1.0;
};

// Pinhole projection of the 8 box corners into the camera at `ego_pose`.
// Returns nullopt when any corner has non-positive depth (behind-camera
// rejection, not an error).
std::optional<std::array<Eigen::Vector2d, 8>> project_corners(const BoxPose& box_global,
                                                              const CameraModel& camera,
                                                              const RigidTransform& ego_pose);

// One candidate per camera where all 8 projected corners land strictly inside
// [0, W) x [0, H) and the annotation visibility clears the threshold.
std::vector<CropCandidate> select_valid_views(const std::string& instance_id,
                                              const BoxPose& box_global, double visibility,
                                              std::span<const CameraModel> cameras,
                                              const RigidTransform& ego_pose,
                                              double min_visibility);

// Integer pixel rectangle of a candidate, expanded outward to whole pixels
// and clamped to the image.
struct PixelRect {
    int u0 = 0, v0 = 0, width = 0, height = 0;
};
PixelRect crop_pixel_rect(const CropCandidate& c, const CameraModel& camera);

} // namespace trimix
