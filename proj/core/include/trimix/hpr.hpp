#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "trimix/rng.hpp"

namespace trimix {

// Virtual sensor position on a spherical shell around an object.
struct Viewpoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

struct SphericalInversionResult {
    std::vector<Eigen::Vector3d> points; // inverted, relative to the viewpoint
    std::vector<int> source_index;       // input index per inverted point
    std::size_t excluded_coincident = 0; // points coincident with the viewpoint
};

// Spherical flipping about the viewpoint: p' = p + 2 (R - |p|) p / |p|, so
// |p'| = 2R - |p|. Requires R >= max |p|; points coincident with the
// viewpoint are excluded and counted.
SphericalInversionResult spherical_inversion(std::span<const Eigen::Vector3d> points,
                                             const Eigen::Vector3d& viewpoint, double radius);

struct HprResult {
    std::vector<bool> visible;           // same cardinality as the input
    bool degenerate = false;             // coplanar/collinear input: mask is all-visible
    std::size_t excluded_coincident = 0; // coincident points, marked hidden
    double radius = 0.0;                 // inversion radius actually used
};

// Hidden-point-removal visibility: invert with R = gamma * max |p - viewpoint|,
// then mark a point visible iff its image is a vertex of the convex hull of
// the inverted set together with the viewpoint. gamma >= 1.
HprResult hpr_visible(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& viewpoint,
                      double gamma);

// Direction uniform on the sphere, radius uniform in [r_min, r_max].
Viewpoint sample_viewpoint(Rng& rng, const Eigen::Vector3d& centroid, double r_min, double r_max);

// Keep the points whose mask entry is set.
std::vector<Eigen::Vector3d> apply_mask(std::span<const Eigen::Vector3d> points,
                                        const std::vector<bool>& mask);

} // namespace trimix
