#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace trimix {

// Rigid-body transform (rotation as a unit quaternion, translation in
// meters). Constructors normalize the quaternion; composition renormalizes,
// so the unit invariant survives long chains.
struct RigidTransform {
    Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
    Eigen::Vector3d translation{0.0, 0.0, 0.0};

    RigidTransform() = default;
    RigidTransform(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

    static RigidTransform identity() { return {}; }
    static RigidTransform translate(double x, double y, double z) {
        return {Eigen::Quaterniond::Identity(), {x, y, z}};
    }
    static RigidTransform rotate_axis(const Eigen::Vector3d& axis, double angle_rad);
    static RigidTransform rotate_z(double angle_rad) {
        return rotate_axis(Eigen::Vector3d::UnitZ(), angle_rad);
    }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

    // this ∘ other: apply `other` first, then this.
    RigidTransform compose(const RigidTransform& other) const;
    RigidTransform inverse() const;

    bool is_unit(double eps = 1e-6) const;
};

// Annotated 3D box: center, orientation, size (l, w, h) and timestamp in
// seconds relative to scene start.
struct BoxPose {
    Eigen::Vector3d center{0.0, 0.0, 0.0};
    Eigen::Quaterniond orientation{1.0, 0.0, 0.0, 0.0};
    Eigen::Vector3d size{1.0, 1.0, 1.0};
    double timestamp = 0.0;

    BoxPose() = default;
    BoxPose(const Eigen::Vector3d& c, const Eigen::Quaterniond& q, const Eigen::Vector3d& s,
            double t);

    // The 8 corners in the box's parent frame, order: bit i of the index
    // selects the sign of axis i.
    std::array<Eigen::Vector3d, 8> corners() const;

    // Point-in-box test with a symmetric margin added to each half extent.
    bool contains(const Eigen::Vector3d& p, double margin = 0.0) const;
};

// Constant linear velocity plus the reference pose/rotation used by the
// canonical warp. The rotation matrix is cached from the reference
// orientation.
struct ObjectMotion {
    Eigen::Vector3d velocity{0.0, 0.0, 0.0};
    BoxPose reference;
    Eigen::Matrix3d rotation0 = Eigen::Matrix3d::Identity();

    // Velocity from the annotated box pair over [prev.timestamp, cur.timestamp].
    static ObjectMotion from_pair(const BoxPose& prev, const BoxPose& cur);
    // Fallback for tracks with a single annotated frame: v = 0, fixed orientation.
    static ObjectMotion static_at(const BoxPose& cur);
};

// Left-to-right product of a transform chain: result(p) == chain[0](chain[1](...(p))).
// Throws std::invalid_argument on an empty list or a non-unit quaternion.
RigidTransform compose_chain(std::span<const RigidTransform> transforms);

// Spherical linear interpolation along the shortest geodesic. q2 is negated
// when q1·q2 < 0; below theta = 1e-8 falls back to normalized lerp.
Eigen::Quaterniond slerp(const Eigen::Quaterniond& q1, const Eigen::Quaterniond& q2, double alpha);

// Geodesic angle between unit quaternions as rotations: acos(|q1·q2|).
double quat_angle(const Eigen::Quaterniond& q1, const Eigen::Quaterniond& q2);

// Box pose at time t in [prev.timestamp, cur.timestamp]: center linearly
// interpolated, orientation slerped from cur toward prev with fraction
// (t0 - t) / M, size copied from cur.
BoxPose interpolate_pose(const BoxPose& prev, const BoxPose& cur, double t);

// v = (c_cur - c_prev) / M. Throws if the timestamps are not increasing.
Eigen::Vector3d estimate_velocity(const BoxPose& prev, const BoxPose& cur);

// Canonical warp: p -> R(t0)^T [p + (t0 - t) v - c(t0)], with t0 and c, R
// taken from motion.reference. Points, velocity and reference pose must be
// expressed in one common frame; the result is in the object frame at t0.
std::vector<Eigen::Vector3d> warp_to_canonical(std::span<const Eigen::Vector3d> points,
                                               const ObjectMotion& motion, double t);

} // namespace trimix
