#include "trimix/camera.hpp"

#include <algorithm>
#include <cmath>

namespace trimix {

std::optional<std::array<Eigen::Vector2d, 8>> project_corners(const BoxPose& box_global,
                                                              const CameraModel& camera,
                                                              const RigidTransform& ego_pose) {
    const RigidTransform cam_from_global = ego_pose.compose(camera.t_ego_cam).inverse();
    std::array<Eigen::Vector2d, 8> out;
    const auto corners = box_global.corners();
    for (std::size_t i = 0; i < corners.size(); ++i) {
        const Eigen::Vector3d pc = cam_from_global.apply(corners[i]);
        if (!(pc.z() > 0.0)) return std::nullopt;
        out[i] = {camera.fx * pc.x() / pc.z() + camera.cx,
                  camera.fy * pc.y() / pc.z() + camera.cy};
    }
    return out;
}

std::vector<CropCandidate> select_valid_views(const std::string& instance_id,
                                              const BoxPose& box_global, double visibility,
                                              std::span<const CameraModel> cameras,
                                              const RigidTransform& ego_pose,
                                              double min_visibility) {
    std::vector<CropCandidate> out;
    if (visibility < min_visibility) return out;
    for (std::size_t j = 0; j < cameras.size(); ++j) {
        const auto& cam = cameras[j];
        const auto projected = project_corners(box_global, cam, ego_pose);
        if (!projected) continue;
        bool inside = true;
        double u_min = 1e300, v_min = 1e300, u_max = -1e300, v_max = -1e300;
        for (const auto& uv : *projected) {
            if (!(uv.x() >= 0.0 && uv.x() < cam.width && uv.y() >= 0.0 && uv.y() < cam.height)) {
                inside = false;
                break;
            }
            u_min = std::min(u_min, uv.x());
            v_min = std::min(v_min, uv.y());
            u_max = std::max(u_max, uv.x());
            v_max = std::max(v_max, uv.y());
        }
        if (!inside) continue;
        CropCandidate c;
        c.instance_id = instance_id;
        c.camera_index = static_cast<int>(j);
        c.timestamp = box_global.timestamp;
        c.u_min = u_min;
        c.v_min = v_min;
        c.u_max = u_max;
        c.v_max = v_max;
        c.visibility = visibility;
        out.push_back(std::move(c));
    }
    return out;
}

PixelRect crop_pixel_rect(const CropCandidate& c, const CameraModel& camera) {
    PixelRect r;
    r.u0 = std::max(0, static_cast<int>(std::floor(c.u_min)));
    r.v0 = std::max(0, static_cast<int>(std::floor(c.v_min)));
    const int u1 = std::min(camera.width, static_cast<int>(std::ceil(c.u_max)));
    const int v1 = std::min(camera.height, static_cast<int>(std::ceil(c.v_max)));
    r.width = std::max(0, u1 - r.u0);
    r.height = std::max(0, v1 - r.v0);
    return r;
}

} // namespace trimix
