#include "trimix/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trimix {

namespace {

double box_sdf(const Eigen::Vector3d& p, const Eigen::Vector3d& half) {
    const Eigen::Vector3d d = p.cwiseAbs() - half;
    const double outside = d.cwiseMax(0.0).norm();
    const double inside = std::min(std::max({d.x(), d.y(), d.z()}), 0.0);
    return outside + inside;
}

Eigen::Vector3d sample_box_surface(Rng& rng, const Eigen::Vector3d& half) {
    // Face areas: yz (x-faces), xz (y-faces), xy (z-faces), each twice.
    const double ayz = half.y() * half.z();
    const double axz = half.x() * half.z();
    const double axy = half.x() * half.y();
    const double total = 2.0 * (ayz + axz + axy);
    double u = rng.uniform(0.0, total);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    if (u < 2.0 * ayz) {
        return {sign * half.x(), a * half.y(), b * half.z()};
    }
    u -= 2.0 * ayz;
    if (u < 2.0 * axz) {
        return {a * half.x(), sign * half.y(), b * half.z()};
    }
    return {a * half.x(), b * half.y(), sign * half.z()};
}

// L-shape = union of a full-footprint lower slab and a rear full-height cab.
struct LShapeParts {
    Eigen::Vector3d half_a, center_a; // lower slab
    Eigen::Vector3d half_b, center_b; // rear cab
};

LShapeParts lshape_parts(const Eigen::Vector3d& size) {
    LShapeParts parts;
    const double slab_h = 0.45 * size.z();
    const double cab_l = 0.40 * size.x();
    parts.half_a = {0.5 * size.x(), 0.5 * size.y(), 0.5 * slab_h};
    parts.center_a = {0.0, 0.0, -0.5 * size.z() + 0.5 * slab_h};
    parts.half_b = {0.5 * cab_l, 0.5 * size.y(), 0.5 * size.z()};
    parts.center_b = {-0.5 * size.x() + 0.5 * cab_l, 0.0, 0.0};
    return parts;
}

} // namespace

Eigen::Vector3d ObjectTemplate::sample_surface(Rng& rng) const {
    const Eigen::Vector3d half = 0.5 * size;
    switch (kind) {
    case TemplateKind::Box:
        return sample_box_surface(rng, half);
    case TemplateKind::Cylinder: {
        const double r = std::min(half.x(), half.y());
        const double hh = half.z();
        const double lateral = 2.0 * EIGEN_PI * r * (2.0 * hh);
        const double caps = 2.0 * EIGEN_PI * r * r;
        if (rng.uniform(0.0, lateral + caps) < lateral) {
            const double phi = rng.uniform(0.0, 2.0 * EIGEN_PI);
            return {r * std::cos(phi), r * std::sin(phi), rng.uniform(-hh, hh)};
        }
        const double rr = r * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, 2.0 * EIGEN_PI);
        const double z = rng.uniform() < 0.5 ? -hh : hh;
        return {rr * std::cos(phi), rr * std::sin(phi), z};
    }
    case TemplateKind::LShape: {
        const auto parts = lshape_parts(size);
        const auto area = [](const Eigen::Vector3d& h) {
            return 8.0 * (h.y() * h.z() + h.x() * h.z() + h.x() * h.y());
        };
        const double wa = area(parts.half_a);
        const double wb = area(parts.half_b);
        // Rejection: drop samples strictly inside the other part.
        for (int attempt = 0; attempt < 64; ++attempt) {
            const bool pick_a = rng.uniform(0.0, wa + wb) < wa;
            const Eigen::Vector3d local =
                sample_box_surface(rng, pick_a ? parts.half_a : parts.half_b);
            const Eigen::Vector3d p = local + (pick_a ? parts.center_a : parts.center_b);
            const double other =
                pick_a ? box_sdf(p - parts.center_b, parts.half_b)
                       : box_sdf(p - parts.center_a, parts.half_a);
            if (other > -1e-9) return p;
        }
        return parts.center_b + Eigen::Vector3d(0, 0, parts.half_b.z());
    }
    }
    return Eigen::Vector3d::Zero();
}

double ObjectTemplate::surface_distance(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d half = 0.5 * size;
    switch (kind) {
    case TemplateKind::Box:
        return std::abs(box_sdf(p, half));
    case TemplateKind::Cylinder: {
        const double r = std::min(half.x(), half.y());
        const double hh = half.z();
        const Eigen::Vector2d d(std::hypot(p.x(), p.y()) - r, std::abs(p.z()) - hh);
        const double outside = d.cwiseMax(0.0).norm();
        const double inside = std::min(std::max(d.x(), d.y()), 0.0);
        return std::abs(outside + inside);
    }
    case TemplateKind::LShape: {
        const auto parts = lshape_parts(size);
        const double sa = box_sdf(p - parts.center_a, parts.half_a);
        const double sb = box_sdf(p - parts.center_b, parts.half_b);
        return std::abs(std::min(sa, sb));
    }
    }
    return 0.0;
}

const char* template_kind_name(TemplateKind kind) {
    switch (kind) {
    case TemplateKind::Box: return "box";
    case TemplateKind::LShape: return "lshape";
    case TemplateKind::Cylinder: return "cylinder";
    }
    return "box";
}

TemplateKind template_kind_from_name(const std::string& name) {
    if (name == "box") return TemplateKind::Box;
    if (name == "lshape") return TemplateKind::LShape;
    if (name == "cylinder") return TemplateKind::Cylinder;
    throw std::invalid_argument("unknown template kind: " + name);
}

const std::vector<ClassSpec>& default_classes() {
    static const std::vector<ClassSpec> classes = {
        {"car", TemplateKind::Box, {4.4, 1.9, 1.5}},
        {"truck", TemplateKind::Box, {7.5, 2.5, 3.0}},
        {"barrier", TemplateKind::Box, {3.0, 0.35, 1.1}},
        {"pedestrian", TemplateKind::Cylinder, {0.7, 0.7, 1.75}},
        {"traffic_cone", TemplateKind::Cylinder, {0.5, 0.5, 0.8}},
        {"construction_vehicle", TemplateKind::LShape, {6.0, 2.6, 2.9}},
    };
    return classes;
}

const ClassSpec* find_class(const std::string& name) {
    for (const auto& c : default_classes()) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

const AnnotatedBox* Track::box_at(double t, double eps) const {
    for (const auto& b : boxes) {
        if (std::abs(b.pose.timestamp - t) <= eps) return &b;
    }
    return nullptr;
}

const Track* Scene::find_track(const std::string& instance_id) const {
    for (const auto& t : tracks) {
        if (t.instance_id == instance_id) return &t;
    }
    return nullptr;
}

int Scene::sweep_index_at(double t, double eps) const {
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        if (std::abs(sweeps[i].timestamp - t) <= eps) return static_cast<int>(i);
    }
    return -1;
}

} // namespace trimix
