#include <doctest.h>

#include "trimix/camera.hpp"

using namespace trimix;

namespace {

// Camera at the global origin looking along +z (camera axes = global axes).
CameraModel simple_camera(double f = 100.0, double cx = 50.0, double cy = 50.0, int w = 100,
                          int h = 100) {
    CameraModel cam;
    cam.fx = cam.fy = f;
    cam.cx = cx;
    cam.cy = cy;
    cam.width = w;
    cam.height = h;
    cam.t_ego_cam = RigidTransform::identity();
    return cam;
}

} // namespace

TEST_CASE("project_corners: unit cube on the optical axis") {
    const CameraModel cam = simple_camera();
    const BoxPose box({0, 0, 5}, Eigen::Quaterniond::Identity(), {1, 1, 1}, 0.0);
    const auto uv = project_corners(box, cam, RigidTransform::identity());
    REQUIRE(uv.has_value());
    // The 8 corners are symmetric around the principal point (50, 50).
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : *uv) mean += p;
    mean /= 8.0;
    CHECK(mean.x() == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(mean.y() == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("project_corners: hand pinhole arithmetic") {
    const CameraModel cam = simple_camera();
    // A degenerate-size-free check: put a box corner exactly at (1, 0, 5).
    const BoxPose box({1.5, 0.5, 5.5}, Eigen::Quaterniond::Identity(), {1, 1, 1}, 0.0);
    const auto uv = project_corners(box, cam, RigidTransform::identity());
    REQUIRE(uv.has_value());
    // Corner index 0 is (-half, -half, -half) => (1, 0, 5).
    CHECK((*uv)[0].x() == doctest::Approx(100.0 * 1.0 / 5.0 + 50.0).epsilon(1e-12));
    CHECK((*uv)[0].y() == doctest::Approx(100.0 * 0.0 / 5.0 + 50.0).epsilon(1e-12));
}

TEST_CASE("project_corners: box behind the camera is rejected") {
    const CameraModel cam = simple_camera();
    const BoxPose box({0, 0, -5}, Eigen::Quaterniond::Identity(), {1, 1, 1}, 0.0);
    CHECK_FALSE(project_corners(box, cam, RigidTransform::identity()).has_value());
    // Straddling the image plane counts as behind.
    const BoxPose straddle({0, 0, 0.2}, Eigen::Quaterniond::Identity(), {1, 1, 1}, 0.0);
    CHECK_FALSE(project_corners(straddle, cam, RigidTransform::identity()).has_value());
}

TEST_CASE("select_valid_views: fully visible box yields exactly one candidate") {
    std::vector<CameraModel> cams = {simple_camera()};
    const BoxPose box({0, 0, 10}, Eigen::Quaterniond::Identity(), {2, 2, 2}, 1.5);
    const auto views =
        select_valid_views("obj", box, 1.0, cams, RigidTransform::identity(), 0.4);
    REQUIRE(views.size() == 1);
    CHECK(views[0].instance_id == "obj");
    CHECK(views[0].camera_index == 0);
    CHECK(views[0].timestamp == 1.5);
    // AABB is tight: every edge touches a projected corner.
    const auto uv = *project_corners(box, cams[0], RigidTransform::identity());
    double umin = 1e9, vmin = 1e9, umax = -1e9, vmax = -1e9;
    for (const auto& p : uv) {
        umin = std::min(umin, p.x());
        umax = std::max(umax, p.x());
        vmin = std::min(vmin, p.y());
        vmax = std::max(vmax, p.y());
    }
    CHECK(views[0].u_min == doctest::Approx(umin));
    CHECK(views[0].u_max == doctest::Approx(umax));
    CHECK(views[0].v_min == doctest::Approx(vmin));
    CHECK(views[0].v_max == doctest::Approx(vmax));
}

TEST_CASE("select_valid_views: one corner outside excludes the camera") {
    std::vector<CameraModel> cams = {simple_camera()};
    // Slide the box sideways until a corner leaves the image.
    for (double shift : {0.0, 4.4}) {
        const BoxPose box({shift, 0, 10}, Eigen::Quaterniond::Identity(), {2, 2, 2}, 0.0);
        const auto views =
            select_valid_views("obj", box, 1.0, cams, RigidTransform::identity(), 0.0);
        if (shift == 0.0) {
            CHECK(views.size() == 1);
        } else {
            // corner at x = 5.4, z = 9: u = 100*5.4/9 + 50 = 110 > 100.
            CHECK(views.empty());
        }
    }
}

TEST_CASE("select_valid_views: visibility threshold gates candidates") {
    std::vector<CameraModel> cams = {simple_camera()};
    const BoxPose box({0, 0, 10}, Eigen::Quaterniond::Identity(), {2, 2, 2}, 0.0);
    CHECK(select_valid_views("obj", box, 0.3, cams, RigidTransform::identity(), 0.4).empty());
    CHECK(select_valid_views("obj", box, 0.4, cams, RigidTransform::identity(), 0.4).size() == 1);
}

TEST_CASE("select_valid_views: monotonicity in image size and threshold") {
    const BoxPose box({0.3, -0.2, 9}, Eigen::Quaterniond::Identity(), {2.5, 1.5, 1.8}, 0.0);
    const double vis = 0.7;
    std::size_t last = 99;
    // Shrinking the image never adds valid views.
    for (int size : {200, 120, 100, 60, 30}) {
        std::vector<CameraModel> cams = {
            simple_camera(100.0, size / 2.0, size / 2.0, size, size)};
        const auto views =
            select_valid_views("obj", box, vis, cams, RigidTransform::identity(), 0.4);
        CHECK(views.size() <= last);
        last = views.size();
    }
    // Raising the threshold never adds candidates.
    std::vector<CameraModel> cams = {simple_camera()};
    std::size_t prev = 99;
    for (double thr : {0.0, 0.3, 0.69, 0.71, 1.0}) {
        const auto views =
            select_valid_views("obj", box, vis, cams, RigidTransform::identity(), thr);
        CHECK(views.size() <= prev);
        prev = views.size();
    }
}

TEST_CASE("crop_pixel_rect: sub-pixel bounds expand outward") {
    const CameraModel cam = simple_camera();
    CropCandidate c;
    c.u_min = 10.3;
    c.v_min = 20.7;
    c.u_max = 30.2;
    c.v_max = 40.1;
    const PixelRect r = crop_pixel_rect(c, cam);
    CHECK(r.u0 == 10);
    CHECK(r.v0 == 20);
    CHECK(r.width == 21);  // ceil(30.2) - 10
    CHECK(r.height == 21); // ceil(40.1) - 20
}
