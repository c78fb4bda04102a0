#include "trimix/hpr.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "trimix/convex_hull.hpp"

namespace trimix {

namespace {

// Rank check on the second moments: collinear/coplanar clouds have a
// vanishing smallest eigenvalue relative to the largest.
bool input_degenerate(std::span<const Eigen::Vector3d> points) {
    if (points.size() < 4) return true;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d d = p - mean;
        m += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
    const auto& ev = solver.eigenvalues();
    return !(ev[0] > 1e-16 * ev[2]);
}

} // namespace

SphericalInversionResult spherical_inversion(std::span<const Eigen::Vector3d> points,
                                             const Eigen::Vector3d& viewpoint, double radius) {
    double max_dist = 0.0;
    for (const auto& p : points) max_dist = std::max(max_dist, (p - viewpoint).norm());
    if (radius < max_dist) {
        throw std::invalid_argument("spherical_inversion: radius below max point distance");
    }
    SphericalInversionResult out;
    out.points.reserve(points.size());
    out.source_index.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Eigen::Vector3d rel = points[i] - viewpoint;
        const double d = rel.norm();
        if (d == 0.0) {
            ++out.excluded_coincident;
            continue;
        }
        out.points.push_back(rel * ((2.0 * radius - d) / d));
        out.source_index.push_back(static_cast<int>(i));
    }
    return out;
}

HprResult hpr_visible(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& viewpoint,
                      double gamma) {
    if (!(gamma >= 1.0)) {
        throw std::invalid_argument("hpr_visible: gamma must be >= 1");
    }
    HprResult result;
    result.visible.assign(points.size(), false);
    if (points.empty()) return result;

    double max_dist = 0.0;
    for (const auto& p : points) max_dist = std::max(max_dist, (p - viewpoint).norm());
    result.radius = gamma * max_dist;
    if (max_dist == 0.0) {
        // Every point coincides with the viewpoint.
        result.degenerate = true;
        result.excluded_coincident = points.size();
        result.visible.assign(points.size(), true);
        return result;
    }
    if (input_degenerate(points)) {
        result.degenerate = true;
        result.visible.assign(points.size(), true);
        return result;
    }

    const auto inv = spherical_inversion(points, viewpoint, result.radius);
    result.excluded_coincident = inv.excluded_coincident;

    // Hull over the inverted set plus the viewpoint (origin in inverted space).
    std::vector<Eigen::Vector3d> hull_input = inv.points;
    hull_input.push_back(Eigen::Vector3d::Zero());
    const auto hull = convex_hull_vertices(hull_input);
    if (hull.degenerate) {
        result.degenerate = true;
        result.visible.assign(points.size(), true);
        return result;
    }
    const int origin_index = static_cast<int>(inv.points.size());
    for (int vi : hull.vertex_indices) {
        if (vi == origin_index) continue;
        result.visible[static_cast<std::size_t>(inv.source_index[static_cast<std::size_t>(vi)])] =
            true;
    }
    return result;
}

Viewpoint sample_viewpoint(Rng& rng, const Eigen::Vector3d& centroid, double r_min, double r_max) {
    if (!(r_min > 0.0) || !(r_min <= r_max)) {
        throw std::invalid_argument("sample_viewpoint: need 0 < r_min <= r_max");
    }
    const Eigen::Vector3d dir = rng.unit_vector();
    const double r = rng.uniform(r_min, r_max);
    return Viewpoint{centroid + r * dir};
}

std::vector<Eigen::Vector3d> apply_mask(std::span<const Eigen::Vector3d> points,
                                        const std::vector<bool>& mask) {
    std::vector<Eigen::Vector3d> out;
    for (std::size_t i = 0; i < points.size() && i < mask.size(); ++i) {
        if (mask[i]) out.push_back(points[i]);
    }
    return out;
}

} // namespace trimix
