#include "trimix/convex_hull.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace trimix {

namespace {

struct Face {
    int a = 0, b = 0, c = 0;
    Eigen::Vector3d normal = Eigen::Vector3d::Zero(); // unit, outward
    double offset = 0.0;                              // normal · x = offset on the plane
    bool alive = false;
};

constexpr double kEps = 1e-10; // on unit-scaled coordinates

Face make_face(int a, int b, int c, const std::vector<Eigen::Vector3d>& pts) {
    Face f;
    f.a = a;
    f.b = b;
    f.c = c;
    Eigen::Vector3d n = (pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)])
                            .cross(pts[static_cast<std::size_t>(c)] - pts[static_cast<std::size_t>(a)]);
    const double len = n.norm();
    if (len > 0.0) n /= len;
    f.normal = n;
    f.offset = n.dot(pts[static_cast<std::size_t>(a)]);
    f.alive = true;
    return f;
}

double signed_dist(const Face& f, const Eigen::Vector3d& p) { return f.normal.dot(p) - f.offset; }

bool lex_less(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
}

} // namespace

ConvexHullResult convex_hull_vertices(std::span<const Eigen::Vector3d> points) {
    ConvexHullResult result;
    const std::size_t n = points.size();
    if (n < 4) {
        result.degenerate = true;
        return result;
    }

    // Center and scale for tolerance stability; hull membership is invariant.
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(n);
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, (p - centroid).norm());
    if (!(scale > 0.0)) {
        result.degenerate = true;
        return result;
    }
    std::vector<Eigen::Vector3d> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = (points[i] - centroid) / scale;

    // Initial simplex from extreme points.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const auto& a = pts[static_cast<std::size_t>(i)];
        const auto& b = pts[static_cast<std::size_t>(j)];
        if (a.x() != b.x() || a.y() != b.y() || a.z() != b.z()) return lex_less(a, b);
        return i < j;
    });

    const int i0 = order.front();
    int i1 = -1;
    double best = kEps;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (pts[i] - pts[static_cast<std::size_t>(i0)]).norm();
        if (d > best) {
            best = d;
            i1 = static_cast<int>(i);
        }
    }
    if (i1 < 0) {
        result.degenerate = true;
        return result;
    }
    const Eigen::Vector3d dir =
        (pts[static_cast<std::size_t>(i1)] - pts[static_cast<std::size_t>(i0)]).normalized();
    int i2 = -1;
    best = kEps;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d rel = pts[i] - pts[static_cast<std::size_t>(i0)];
        const double d = (rel - rel.dot(dir) * dir).norm();
        if (d > best) {
            best = d;
            i2 = static_cast<int>(i);
        }
    }
    if (i2 < 0) {
        result.degenerate = true; // collinear
        return result;
    }
    Face base = make_face(i0, i1, i2, pts);
    int i3 = -1;
    best = kEps;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(signed_dist(base, pts[i]));
        if (d > best) {
            best = d;
            i3 = static_cast<int>(i);
        }
    }
    if (i3 < 0) {
        result.degenerate = true; // coplanar
        return result;
    }

    std::vector<Face> faces;
    faces.reserve(8 * n);
    // The initial simplex centroid stays strictly interior for the whole
    // run; every face is oriented away from it.
    const Eigen::Vector3d inner =
        0.25 * (pts[static_cast<std::size_t>(i0)] + pts[static_cast<std::size_t>(i1)] +
                pts[static_cast<std::size_t>(i2)] + pts[static_cast<std::size_t>(i3)]);
    const auto push_face = [&](int a, int b, int c) {
        Face f = make_face(a, b, c, pts);
        if (signed_dist(f, inner) > 0.0) f = make_face(a, c, b, pts);
        faces.push_back(f);
    };
    push_face(i0, i1, i2);
    push_face(i0, i1, i3);
    push_face(i0, i2, i3);
    push_face(i1, i2, i3);

    std::vector<char> in_simplex(n, 0);
    in_simplex[static_cast<std::size_t>(i0)] = in_simplex[static_cast<std::size_t>(i1)] =
        in_simplex[static_cast<std::size_t>(i2)] = in_simplex[static_cast<std::size_t>(i3)] = 1;

    std::vector<int> visible;
    std::map<std::pair<int, int>, int> edge_count; // directed edges of visible faces
    for (int idx : order) {
        if (in_simplex[static_cast<std::size_t>(idx)]) continue;
        const Eigen::Vector3d& p = pts[static_cast<std::size_t>(idx)];

        visible.clear();
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            if (faces[fi].alive && signed_dist(faces[fi], p) > kEps) {
                visible.push_back(static_cast<int>(fi));
            }
        }
        if (visible.empty()) continue; // inside or on the hull

        edge_count.clear();
        for (int fi : visible) {
            const Face& f = faces[static_cast<std::size_t>(fi)];
            edge_count[{f.a, f.b}]++;
            edge_count[{f.b, f.c}]++;
            edge_count[{f.c, f.a}]++;
            faces[static_cast<std::size_t>(fi)].alive = false;
        }
        // Horizon edges appear in one visible face and their reverse in none.
        for (const auto& [edge, cnt] : edge_count) {
            (void)cnt;
            if (edge_count.count({edge.second, edge.first})) continue; // interior edge
            push_face(edge.first, edge.second, idx);
        }
    }

    std::set<int> verts;
    for (const auto& f : faces) {
        if (!f.alive) continue;
        verts.insert(f.a);
        verts.insert(f.b);
        verts.insert(f.c);
    }
    result.vertex_indices.assign(verts.begin(), verts.end());
    return result;
}

} // namespace trimix
