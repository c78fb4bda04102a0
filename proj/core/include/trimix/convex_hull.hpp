#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace trimix {

struct ConvexHullResult {
    // Indices of input points that are vertices of the hull, ascending.
    std::vector<int> vertex_indices;
    // Set when the input is degenerate (fewer than 4 points, or all points
    // coincident / collinear / coplanar within tolerance). vertex_indices is
    // empty in that case.
    bool degenerate = false;
};

// Incremental 3D convex hull. Points are inserted in lexicographic order of
// (x, y, z, input index), which makes the construction deterministic for a
// given input including ties and exact duplicates. Coordinates are centered
// and scaled internally, so the tolerance is relative to the point-set
// extent.
ConvexHullResult convex_hull_vertices(std::span<const Eigen::Vector3d> points);

} // namespace trimix
