#include "trimix/sweep_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trimix {

namespace {

constexpr double kTimeEps = 1e-9;

// Interpolated global box at sweep time t, or nullopt when t lies before the
// track's first annotation and cannot be covered.
std::optional<BoxPose> box_at_sweep(const Track& track, double t) {
    const auto& boxes = track.boxes;
    if (boxes.empty()) return std::nullopt;
    if (boxes.size() == 1) return boxes.front().pose; // static fallback
    for (const auto& b : boxes) {
        if (std::abs(b.pose.timestamp - t) <= kTimeEps) return b.pose;
    }
    for (std::size_t i = 1; i < boxes.size(); ++i) {
        if (t > boxes[i - 1].pose.timestamp && t < boxes[i].pose.timestamp) {
            return interpolate_pose(boxes[i - 1].pose, boxes[i].pose, t);
        }
    }
    return std::nullopt; // before the earliest annotation
}

} // namespace

std::vector<Eigen::Vector3d> compensate_sweep(const Scene& scene, double t, double t0) {
    const int it = scene.sweep_index_at(t);
    const int it0 = scene.sweep_index_at(t0);
    if (it < 0) throw std::invalid_argument("compensate_sweep: no sweep (ego pose) at t");
    if (it0 < 0) throw std::invalid_argument("compensate_sweep: no sweep (ego pose) at t0");
    const Sweep& from = scene.sweeps[static_cast<std::size_t>(it)];
    const Sweep& to = scene.sweeps[static_cast<std::size_t>(it0)];

    const RigidTransform chain[] = {
        to.sensor_mount.inverse(), // T^{s_t0}_{e_t0}
        to.ego_pose.inverse(),     // T^{e_t0}_g
        from.ego_pose,             // T^g_{e_t}
        from.sensor_mount,         // T^{e_t}_{s_t}
    };
    const RigidTransform map = compose_chain(chain);

    std::vector<Eigen::Vector3d> out;
    out.reserve(from.points.size());
    for (const auto& p : from.points) {
        out.push_back(map.apply(p.xyz()));
    }
    return out;
}

FusedObjectCloud fuse_object(const Scene& scene, const std::string& instance_id, double t0,
                             const FusionOptions& options) {
    if (options.sweeps < 1) throw std::invalid_argument("fuse_object: sweeps must be >= 1");
    const Track* track = scene.find_track(instance_id);
    if (!track) throw std::invalid_argument("fuse_object: unknown instance " + instance_id);
    const AnnotatedBox* cur = track->box_at(t0, kTimeEps);
    if (!cur) throw std::invalid_argument("fuse_object: instance not annotated at t0");
    const int sweep_t0 = scene.sweep_index_at(t0, kTimeEps);
    if (sweep_t0 < 0) throw std::invalid_argument("fuse_object: t0 is not a sweep timestamp");

    // Velocity over [t0 - M, t0]; static when there is no previous annotation.
    const AnnotatedBox* prev = track->box_at(t0 - scene.annotation_interval, 1e-6);
    ObjectMotion motion_global = (prev && options.compensate_motion)
                                     ? ObjectMotion::from_pair(prev->pose, cur->pose)
                                     : ObjectMotion::static_at(cur->pose);

    // Everything below happens in the sensor frame at t0.
    const RigidTransform sensor_from_global =
        scene.sweeps[static_cast<std::size_t>(sweep_t0)].sensor_to_global().inverse();
    const Eigen::Matrix3d rot_sg = sensor_from_global.rotation.toRotationMatrix();

    BoxPose ref_sensor = cur->pose;
    ref_sensor.center = sensor_from_global.apply(cur->pose.center);
    ref_sensor.orientation = sensor_from_global.rotation * cur->pose.orientation;
    ObjectMotion motion;
    motion.velocity = rot_sg * motion_global.velocity;
    motion.reference = ref_sensor;
    motion.rotation0 = ref_sensor.orientation.toRotationMatrix();

    FusedObjectCloud fused;
    fused.instance_id = instance_id;
    fused.t0 = t0;

    // Window: the most recent `sweeps` sweeps ending at t0.
    const int first = std::max(0, sweep_t0 - options.sweeps + 1);
    for (int k = first; k <= sweep_t0; ++k) {
        const double t = scene.sweeps[static_cast<std::size_t>(k)].timestamp;
        const auto box_global = box_at_sweep(*track, t);
        if (!box_global) continue;

        BoxPose box_sensor = *box_global;
        box_sensor.center = sensor_from_global.apply(box_global->center);
        box_sensor.orientation = sensor_from_global.rotation * box_global->orientation;

        const auto compensated = compensate_sweep(scene, t, t0);
        std::vector<Eigen::Vector3d> cropped;
        for (const auto& p : compensated) {
            if (box_sensor.contains(p, options.crop_margin)) cropped.push_back(p);
        }
        auto warped = warp_to_canonical(cropped, motion, t);
        fused.points.insert(fused.points.end(), warped.begin(), warped.end());
        ++fused.source_sweep_count;
    }
    return fused;
}

bool filter_min_points(const FusedObjectCloud& cloud, std::size_t threshold) {
    return cloud.points.size() >= threshold;
}

} // namespace trimix
