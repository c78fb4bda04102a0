#include "trimix/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace trimix {

namespace {

void require_unit(const Eigen::Quaterniond& q, const char* what) {
    if (std::abs(q.norm() - 1.0) > 1e-6) {
        throw std::invalid_argument(std::string(what) + ": quaternion is not unit-norm");
    }
}

} // namespace

RigidTransform::RigidTransform(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
    : rotation(q), translation(t) {
    const double n = rotation.norm();
    if (!(n > 1e-12) || !std::isfinite(n)) {
        throw std::invalid_argument("RigidTransform: quaternion norm is zero or non-finite");
    }
    rotation.normalize();
}

RigidTransform RigidTransform::rotate_axis(const Eigen::Vector3d& axis, double angle_rad) {
    return {Eigen::Quaterniond(Eigen::AngleAxisd(angle_rad, axis.normalized())),
            Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.rotation.normalize();
    out.translation = translation + rotation * other.translation;
    return out;
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform out;
    out.rotation = rotation.conjugate();
    out.translation = -(out.rotation * translation);
    return out;
}

bool RigidTransform::is_unit(double eps) const { return std::abs(rotation.norm() - 1.0) <= eps; }

BoxPose::BoxPose(const Eigen::Vector3d& c, const Eigen::Quaterniond& q, const Eigen::Vector3d& s,
                 double t)
    : center(c), orientation(q), size(s), timestamp(t) {
    if (!(size.x() > 0.0 && size.y() > 0.0 && size.z() > 0.0)) {
        throw std::invalid_argument("BoxPose: size components must be > 0");
    }
    require_unit(orientation, "BoxPose");
    orientation.normalize();
}

std::array<Eigen::Vector3d, 8> BoxPose::corners() const {
    std::array<Eigen::Vector3d, 8> out;
    const Eigen::Vector3d half = 0.5 * size;
    for (int i = 0; i < 8; ++i) {
        const Eigen::Vector3d local((i & 1) ? half.x() : -half.x(),
                                    (i & 2) ? half.y() : -half.y(),
                                    (i & 4) ? half.z() : -half.z());
        out[static_cast<std::size_t>(i)] = orientation * local + center;
    }
    return out;
}

bool BoxPose::contains(const Eigen::Vector3d& p, double margin) const {
    const Eigen::Vector3d local = orientation.conjugate() * (p - center);
    const Eigen::Vector3d lim = 0.5 * size + Eigen::Vector3d::Constant(margin);
    return std::abs(local.x()) <= lim.x() && std::abs(local.y()) <= lim.y() &&
           std::abs(local.z()) <= lim.z();
}

ObjectMotion ObjectMotion::from_pair(const BoxPose& prev, const BoxPose& cur) {
    ObjectMotion m;
    m.velocity = estimate_velocity(prev, cur);
    m.reference = cur;
    m.rotation0 = cur.orientation.toRotationMatrix();
    return m;
}

ObjectMotion ObjectMotion::static_at(const BoxPose& cur) {
    ObjectMotion m;
    m.velocity.setZero();
    m.reference = cur;
    m.rotation0 = cur.orientation.toRotationMatrix();
    return m;
}

RigidTransform compose_chain(std::span<const RigidTransform> transforms) {
    if (transforms.empty()) {
        throw std::invalid_argument("compose_chain: transform list is empty");
    }
    for (const auto& t : transforms) {
        if (!t.is_unit()) {
            throw std::invalid_argument("compose_chain: non-unit quaternion in chain");
        }
    }
    RigidTransform acc = transforms[0];
    for (std::size_t i = 1; i < transforms.size(); ++i) {
        acc = acc.compose(transforms[i]);
    }
    return acc;
}

Eigen::Quaterniond slerp(const Eigen::Quaterniond& q1, const Eigen::Quaterniond& q2in,
                         double alpha) {
    require_unit(q1, "slerp");
    require_unit(q2in, "slerp");
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("slerp: alpha outside [0, 1]");
    }
    Eigen::Quaterniond q2 = q2in;
    double dot = q1.dot(q2);
    if (dot < 0.0) {
        q2.coeffs() = -q2.coeffs();
        dot = -dot;
    }
    dot = std::min(dot, 1.0);
    const double theta = std::acos(dot);
    Eigen::Quaterniond out;
    if (theta < 1e-8) {
        out.coeffs() = (1.0 - alpha) * q1.coeffs() + alpha * q2.coeffs();
    } else {
        const double s = std::sin(theta);
        out.coeffs() = (std::sin((1.0 - alpha) * theta) / s) * q1.coeffs() +
                       (std::sin(alpha * theta) / s) * q2.coeffs();
    }
    out.normalize();
    return out;
}

double quat_angle(const Eigen::Quaterniond& q1, const Eigen::Quaterniond& q2) {
    const double d = std::min(std::abs(q1.dot(q2)), 1.0);
    return std::acos(d);
}

BoxPose interpolate_pose(const BoxPose& prev, const BoxPose& cur, double t) {
    const double t0 = cur.timestamp;
    const double m = t0 - prev.timestamp;
    if (!(m > 0.0)) {
        throw std::invalid_argument("interpolate_pose: annotation interval must be positive");
    }
    const double slack = 1e-9 * std::max(1.0, std::abs(t0));
    if (t < prev.timestamp - slack || t > t0 + slack) {
        throw std::invalid_argument("interpolate_pose: t outside [t0 - M, t0]");
    }
    const double back = std::clamp((t0 - t) / m, 0.0, 1.0);
    BoxPose out;
    out.center = cur.center + ((t - t0) / m) * (cur.center - prev.center);
    out.orientation = slerp(cur.orientation, prev.orientation, back);
    out.size = cur.size;
    out.timestamp = t;
    return out;
}

Eigen::Vector3d estimate_velocity(const BoxPose& prev, const BoxPose& cur) {
    const double m = cur.timestamp - prev.timestamp;
    if (!(m > 0.0)) {
        throw std::invalid_argument("estimate_velocity: timestamps must be increasing");
    }
    return (cur.center - prev.center) / m;
}

std::vector<Eigen::Vector3d> warp_to_canonical(std::span<const Eigen::Vector3d> points,
                                               const ObjectMotion& motion, double t) {
    const double t0 = motion.reference.timestamp;
    const Eigen::Vector3d shift = (t0 - t) * motion.velocity - motion.reference.center;
    const Eigen::Matrix3d rt = motion.rotation0.transpose();
    std::vector<Eigen::Vector3d> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        out.push_back(rt * (p + shift));
    }
    return out;
}

} // namespace trimix
