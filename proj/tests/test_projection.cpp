// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "camera.hpp"
#include "error.hpp"
#include "projection.hpp"
#include "render.hpp"
#include "test_util.hpp"

using namespace ntcr;

TEST_CASE("disparity to depth follows Z = b*f/d") {
    const StereoGeometry g{50.0, 400.0};
    CHECK(disparity_to_depth(200.0, g) == doctest::Approx(100.0));
    CHECK(disparity_to_depth(0.0, g) == kInvalidDepth);
    CHECK_THROWS_AS(disparity_to_depth(-1.0, g), Error);
}

TEST_CASE("disparity round trip is an algebraic inverse") {
    const StereoGeometry g{18.0, 380.0};
    SequentialRng rng(1);
    for (int i = 0; i < 100; ++i) {
        const double z = rng.uniform(10.0, 800.0);
        const double d = depth_to_disparity(z, g);
        CHECK(disparity_to_depth(d, g) == doctest::Approx(z).epsilon(1e-9));
    }
}

namespace {

DepthMap simple_map(int width, int height, double fill) {
    DepthMap map;
    map.width = width;
    map.height = height;
    map.intrinsics = {380.0, 380.0, (width - 1) / 2.0, (height - 1) / 2.0};
    map.depth.assign(static_cast<std::size_t>(width) * height, fill);
    return map;
}

}  // namespace

TEST_CASE("principal-point pixel back-projects onto the optical axis") {
    DepthMap map = simple_map(11, 11, kInvalidDepth);
    map.intrinsics = {380.0, 380.0, 5.0, 5.0};
    map.at(5, 5) = 42.0;
    const PointCloud cloud = depth_to_cloud(map).cloud;
    REQUIRE(cloud.size() == 1);
    CHECK((cloud.points[0] - Vec3(0, 0, 42)).norm() < 1e-12);
    CHECK(cloud.frame == "base");
}

TEST_CASE("a pixel one focal length right of center has X = Z") {
    DepthMap map = simple_map(900, 11, kInvalidDepth);
    map.intrinsics = {380.0, 380.0, 100.0, 5.0};
    map.at(480, 5) = 37.0;  // u = cx + fx
    const PointCloud cloud = depth_to_cloud(map).cloud;
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0].x() == doctest::Approx(37.0).epsilon(1e-12));
    CHECK(cloud.points[0].z() == doctest::Approx(37.0).epsilon(1e-12));
}

TEST_CASE("all-invalid depth map yields an empty cloud with a warning") {
    const DepthMap map = simple_map(8, 8, kInvalidDepth);
    const CloudFromDepthResult result = depth_to_cloud(map);
    CHECK(result.cloud.empty());
    REQUIRE(result.warnings.size() == 1);
}

TEST_CASE("cloud size equals the valid-pixel count exactly") {
    DepthMap map = simple_map(64, 48, kInvalidDepth);
    SequentialRng rng(2);
    std::size_t valid = 0;
    for (double& d : map.depth) {
        if (rng.uniform() < 0.3) {
            d = rng.uniform(10, 100);
            ++valid;
        }
    }
    CHECK(depth_to_cloud(map).cloud.size() == valid);
    CHECK(map.valid_count() == valid);
}

TEST_CASE("synthetic plane render back-projects onto the analytic plane") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);  // camera at (0,0,-90) looking +z
    cam.depth_noise_fraction = 0.0;
    cam.disparity_quantization = 0.125;
    const PlaneScene plane(Vec3(0, 0, 0), Vec3(0, 0, 1));
    const RenderResult render = render_depth_scene(plane, cam, 0);
    const PointCloud cloud = depth_to_cloud(render.map).cloud;
    REQUIRE(cloud.size() == render.map.valid_count());
    // Quantization bounds the depth error: dZ = Z^2/(b f) * dq/2.
    const double tol = 90.0 * 90.0 / (cam.stereo_baseline * cam.intrinsics.fx) *
                       cam.disparity_quantization;
    for (const Vec3& p : cloud.points) CHECK(std::abs(p.z()) <= tol);
}

TEST_CASE("projection round trip reproduces pixels and depths") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);
    cam.width = 160;
    cam.height = 120;
    cam.intrinsics = {95.0, 95.0, 79.5, 59.5};
    const SphereScene sphere(Vec3(0, 0, 0), 5.0);
    const RenderResult render = render_depth_scene(sphere, cam, 3);
    REQUIRE(render.map.valid_count() > 50);

    const PointCloud cloud = depth_to_cloud(render.map).cloud;
    std::size_t idx = 0;
    for (int v = 0; v < render.map.height; ++v) {
        for (int u = 0; u < render.map.width; ++u) {
            const double z = render.map.at(u, v);
            if (!depth_valid(z)) continue;
            const auto px = project_point(cloud.points[idx], render.map.intrinsics,
                                          render.map.camera_pose);
            REQUIRE(px.has_value());
            CHECK(std::abs(px->u - u) < 0.5);
            CHECK(std::abs(px->v - v) < 0.5);
            CHECK(px->z == doctest::Approx(z).epsilon(1e-6));
            ++idx;
        }
    }
    CHECK(idx == cloud.size());
}

TEST_CASE("merge: empty cloud is the neutral element") {
    PointCloud a = test::random_cloud(100, 3);
    a.colors.assign(100, Rgb{1, 2, 3});
    PointCloud empty;
    const PointCloud m1 = merge_clouds(a, empty);
    CHECK(m1.size() == 100);
    CHECK(m1.has_colors());
    CHECK(m1.frame == a.frame);
    const PointCloud m2 = merge_clouds(empty, a);
    CHECK(m2.size() == 100);
    CHECK(m2.has_colors());
}

TEST_CASE("merge concatenates and keeps order stable") {
    const PointCloud a = test::random_cloud(100, 4);
    const PointCloud b = test::random_cloud(150, 5);
    const PointCloud out = merge_clouds(a, b);
    REQUIRE(out.size() == 250);
    CHECK(out.points[0] == a.points[0]);
    CHECK(out.points[99] == a.points[99]);
    CHECK(out.points[100] == b.points[0]);
    CHECK(out.points[249] == b.points[149]);
}

TEST_CASE("merge is associative") {
    const PointCloud a = test::random_cloud(10, 6);
    const PointCloud b = test::random_cloud(20, 7);
    const PointCloud c = test::random_cloud(30, 8);
    const PointCloud left = merge_clouds(merge_clouds(a, b), c);
    const PointCloud right = merge_clouds(a, merge_clouds(b, c));
    REQUIRE(left.size() == right.size());
    for (std::size_t i = 0; i < left.size(); ++i)
        CHECK(left.points[i] == right.points[i]);
}

TEST_CASE("merging different frames is an error") {
    const PointCloud a = test::random_cloud(10, 9, "base");
    const PointCloud b = test::random_cloud(10, 10, "camera0");
    CHECK_THROWS_AS(merge_clouds(a, b), Error);
}

TEST_CASE("opposed-rig sphere captures cover both hemispheres") {
    VirtualCamera tmpl;
    tmpl.depth_noise_fraction = 0.0;
    tmpl.disparity_quantization = 0.0;
    const auto [front, back] = make_opposed_rig(90.0, tmpl);
    const SphereScene sphere(Vec3(0, 0, 0), 5.0);

    PointCloud merged;
    for (const VirtualCamera& cam : {front, back}) {
        const RenderResult render = render_depth_scene(sphere, cam, 11);
        merged = merge_clouds(merged, depth_to_cloud(render.map).cloud);
    }
    REQUIRE(merged.size() > 1000);

    // Longitude histogram around the y axis, near the equator band.
    constexpr int kBins = 36;  // 10 degrees per bin
    int hist[kBins] = {};
    for (const Vec3& p : merged.points) {
        if (std::abs(p.y()) > 2.5) continue;
        const double lon = std::atan2(p.z(), p.x());  // (-pi, pi]
        int bin = static_cast<int>((lon + 3.14159265358979323846) /
                                   (2 * 3.14159265358979323846) * kBins);
        bin = std::clamp(bin, 0, kBins - 1);
        ++hist[bin];
    }
    // Longest run of empty bins, cyclic.
    int longest = 0, current = 0;
    for (int i = 0; i < 2 * kBins; ++i) {
        if (hist[i % kBins] == 0) {
            ++current;
            longest = std::max(longest, current);
        } else {
            current = 0;
        }
    }
    CHECK(longest * 10 < 30);  // max angular gap below 30 degrees
}
