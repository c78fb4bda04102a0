#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "trimix/scene.hpp"

namespace trimix {

// Motion-compensated multi-sweep object cloud in the canonical object frame
// at the reference time t0.
struct FusedObjectCloud {
    std::string instance_id;
    double t0 = 0.0;
    std::vector<Eigen::Vector3d> points;
    int source_sweep_count = 0;
};

// Ego-motion compensation: map the points of sweep t into the sensor frame
// at t0 through T^{s_t0}_{e_t0} . T^{e_t0}_g . T^g_{e_t} . T^{e_t}_{s_t}.
// At t == t0 the chain is the identity. Throws std::invalid_argument when
// either timestamp has no sweep (no ego pose available).
std::vector<Eigen::Vector3d> compensate_sweep(const Scene& scene, double t, double t0);

struct FusionOptions {
    int sweeps = 10;              // window size N, most recent sweeps ending at t0
    double crop_margin = 0.10;    // box inflation per side, meters
    bool compensate_motion = true; // false: crop as usual but warp with v = 0
};

// Per sweep in the window: interpolate the box from the enclosing annotated
// pair, crop points inside the inflated box, and warp them into the object
// frame at t0 with the velocity estimated over [t0 - M, t0]. Sweeps older
// than the track's earliest annotation are skipped; single-frame tracks fall
// back to v = 0 with the t0 orientation.
FusedObjectCloud fuse_object(const Scene& scene, const std::string& instance_id, double t0,
                             const FusionOptions& options = {});

// Keep the cloud iff it has at least `threshold` points.
bool filter_min_points(const FusedObjectCloud& cloud, std::size_t threshold);

} // namespace trimix
