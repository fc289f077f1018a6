// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "camera.hpp"
#include "error.hpp"
#include "ntcr_model.hpp"
#include "pgm_io.hpp"
#include "projection.hpp"
#include "render.hpp"
#include "test_util.hpp"

using namespace ntcr;

namespace {

NtcrSpec default_spec() {
    NtcrSpec spec;  // paper-scale tube: 3.5 mm, 16 x 1.5 mm notches
    return spec;
}

}  // namespace

TEST_CASE("spec validation enforces the geometric invariants") {
    CHECK_NOTHROW(validate_spec(default_spec()));

    NtcrSpec thick = default_spec();
    thick.wall_thickness = 2.0;
    CHECK_THROWS_AS(validate_spec(thick), Error);

    NtcrSpec wide = default_spec();
    wide.notch_width = 3.0;  // exceeds spacing
    CHECK_THROWS_AS(validate_spec(wide), Error);

    NtcrSpec deep = default_spec();
    deep.notch_depth = 4.0;  // exceeds diameter
    CHECK_THROWS_AS(validate_spec(deep), Error);

    NtcrSpec overflow = default_spec();
    overflow.tube_length = 30.0;  // notch pattern no longer fits
    CHECK_THROWS_AS(validate_spec(overflow), Error);
}

TEST_CASE("plain tube samples to a cylinder") {
    NtcrSpec spec = default_spec();
    spec.notch_count = 0;
    spec.bend_curvature = 0.0;
    const PointCloud cloud = sample_ntcr_surface(spec, 20.0);
    REQUIRE(cloud.size() > 100);
    REQUIRE(cloud.has_normals());
    const double radius = spec.outer_diameter / 2.0;
    for (const Vec3& p : cloud.points) {
        const double r = std::hypot(p.y(), p.z());
        CHECK(std::abs(r - radius) < 1e-6);
    }
    CHECK(cloud.frame == kReferenceFrame);
    CHECK_NOTHROW(validate_cloud(cloud));
}

TEST_CASE("sample count tracks density times surface area") {
    const NtcrSpec spec = default_spec();
    const NtcrModel model(spec);
    const double density = 30.0;
    const PointCloud cloud = sample_ntcr_surface(spec, density);
    const double expected = density * model.sampled_surface_area();
    CHECK(std::abs(static_cast<double>(cloud.size()) - expected) <= 0.10 * expected);
}

TEST_CASE("too low a density is rejected") {
    CHECK_THROWS_AS(sample_ntcr_surface(default_spec(), 0.01), Error);
}

TEST_CASE("axial histogram shows exactly 16 gaps about 1.5 mm wide") {
    NtcrSpec spec = default_spec();
    spec.bend_curvature = 0.0;
    const NtcrModel model(spec);
    const PointCloud cloud = sample_ntcr_surface(spec, 60.0);

    // Cut-side occupancy along the axis.
    const double bin = 0.05;
    const double half_len = spec.tube_length / 2.0;
    const int bins = static_cast<int>(std::round(spec.tube_length / bin));
    std::vector<int> hist(bins, 0);
    for (const Vec3& p : cloud.points) {
        if (p.z() <= 0.0) continue;  // notch side only (phase 0 cuts face +z)
        const int b = std::clamp(
            static_cast<int>(std::floor((p.x() + half_len) / bin)), 0, bins - 1);
        ++hist[b];
    }

    struct Gap {
        double start, extent;
    };
    std::vector<Gap> gaps;
    for (int b = 0; b < bins;) {
        if (hist[b] == 0) {
            int e = b;
            while (e + 1 < bins && hist[e + 1] == 0) ++e;
            gaps.push_back({-half_len + b * bin, (e - b + 1) * bin});
            b = e + 1;
        } else {
            ++b;
        }
    }
    REQUIRE(gaps.size() == 16);
    for (const Gap& g : gaps) {
        CHECK(g.extent > spec.notch_width - 0.15);
        CHECK(g.extent <= spec.notch_width + 0.05);
    }
    // Gaps line up with the cut windows.
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double center = gaps[i].start + gaps[i].extent / 2.0;
        CHECK(std::abs(center - model.notch_centers()[i]) < 0.1);
    }
}

TEST_CASE("axial extent spans the tube length") {
    for (const double curvature : {0.0, 0.004}) {
        NtcrSpec spec = default_spec();
        spec.bend_curvature = curvature;
        const NtcrModel model(spec);
        const PointCloud cloud = sample_ntcr_surface(spec, 25.0);
        double a_min = 1e9, a_max = -1e9;
        for (const Vec3& p : cloud.points) {
            const double a = model.straighten(p).a;
            a_min = std::min(a_min, a);
            a_max = std::max(a_max, a);
        }
        CHECK(a_max - a_min > spec.tube_length - 0.1);
        CHECK(a_max - a_min <= spec.tube_length + 1e-9);
    }
}

TEST_CASE("no sample lies strictly inside a notch void") {
    for (const double curvature : {0.0, 0.006}) {
        NtcrSpec spec = default_spec();
        spec.bend_curvature = curvature;
        const NtcrModel model(spec);
        const PointCloud cloud = sample_ntcr_surface(spec, 40.0);
        const double eps = 1e-9;  // samples may sit exactly on void boundaries
        for (const Vec3& p : cloud.points) {
            const NtcrModel::Local l = model.straighten(p);
            bool strictly_inside_void = false;
            if (l.alpha > model.cut_plane() + eps) {
                for (const double c : model.notch_centers())
                    strictly_inside_void =
                        strictly_inside_void ||
                        std::abs(l.a - c) < spec.notch_width / 2.0 - eps;
            }
            CHECK_FALSE(strictly_inside_void);
        }
    }
}

TEST_CASE("bend map and straighten are inverse") {
    NtcrSpec spec = default_spec();
    spec.bend_curvature = 0.01;
    spec.notch_phase_deg = 30.0;
    const NtcrModel model(spec);
    SequentialRng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(-22, 22);
        const double alpha = rng.uniform(-1.7, 1.7);
        const double beta = rng.uniform(-1.7, 1.7);
        const Vec3 world = model.bend_point(a, alpha, beta);
        const NtcrModel::Local l = model.straighten(world);
        CHECK(l.a == doctest::Approx(a).epsilon(1e-9));
        CHECK(l.alpha == doctest::Approx(alpha).epsilon(1e-9));
        CHECK(l.beta == doctest::Approx(beta).epsilon(1e-9));
    }
}

TEST_CASE("fronto-parallel plane at 90 mm renders exactly 90 everywhere") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);
    cam.depth_noise_fraction = 0.0;
    cam.disparity_quantization = 0.0;
    const PlaneScene plane(Vec3(0, 0, 0), Vec3(0, 0, 1));
    const RenderResult render = render_depth_scene(plane, cam, 1);
    CHECK_FALSE(render.empty_frustum);
    for (const double d : render.map.depth) CHECK(d == 90.0);
}

TEST_CASE("identical seeds give bit-identical renders") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);
    const RenderResult a = render_depth(default_spec(), cam, 77);
    const RenderResult b = render_depth(default_spec(), cam, 77);
    CHECK(a.map.depth == b.map.depth);
    const RenderResult c = render_depth(default_spec(), cam, 78);
    CHECK(a.map.depth != c.map.depth);
}

TEST_CASE("2% multiplicative noise at 500 mm gives a 10 mm depth std") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 500);
    cam.depth_noise_fraction = 0.02;
    cam.disparity_quantization = 0.0;
    const PlaneScene plane(Vec3(0, 0, 0), Vec3(0, 0, 1));
    const RenderResult render = render_depth_scene(plane, cam, 2);

    const std::size_t n = render.map.valid_count();
    REQUIRE(n >= 100000);
    double sum = 0.0;
    for (const double d : render.map.depth) sum += d;
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const double d : render.map.depth) var += (d - mean) * (d - mean);
    const double stddev = std::sqrt(var / static_cast<double>(n));

    CHECK(std::abs(mean - 500.0) / 500.0 < 0.005);  // relative bias -> 0
    CHECK(stddev == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("noise std converges to the configured fraction") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);
    cam.depth_noise_fraction = 0.004;
    cam.disparity_quantization = 0.0;
    const PlaneScene plane(Vec3(0, 0, 0), Vec3(0, 0, 1));
    const RenderResult render = render_depth_scene(plane, cam, 3);
    const std::size_t n = render.map.valid_count();
    REQUIRE(n >= 100000);
    double sum = 0.0;
    for (const double d : render.map.depth) sum += d / 90.0 - 1.0;
    const double mean_rel = sum / static_cast<double>(n);
    double var = 0.0;
    for (const double d : render.map.depth) {
        const double rel = d / 90.0 - 1.0;
        var += (rel - mean_rel) * (rel - mean_rel);
    }
    const double std_rel = std::sqrt(var / static_cast<double>(n));
    CHECK(std::abs(mean_rel) < 0.004 * 0.05);
    CHECK(std_rel == doctest::Approx(0.004).epsilon(0.05));
}

TEST_CASE("sphere depth at the principal pixel is D - r") {
    VirtualCamera cam;
    cam.intrinsics = {380.0, 380.0, 320.0, 240.0};  // integer principal pixel
    cam.pose.translation = Vec3(0, 0, 90);
    cam.depth_noise_fraction = 0.0;
    cam.disparity_quantization = 0.0;
    const SphereScene sphere(Vec3(0, 0, 0), 5.0);
    const RenderResult render = render_depth_scene(sphere, cam, 4);
    CHECK(render.map.at(320, 240) == doctest::Approx(85.0).epsilon(1e-6));
}

TEST_CASE("tube render hits lie on the solid boundary") {
    NtcrSpec spec = default_spec();
    spec.bend_curvature = 0.004;
    const NtcrModel model(spec);
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);
    cam.depth_noise_fraction = 0.0;
    cam.disparity_quantization = 0.0;
    const RenderResult render = render_depth(spec, cam, 5);
    REQUIRE(render.map.valid_count() > 1000);

    const Vec3 origin = Vec3(0, 0, -90);
    const double ro = model.outer_radius();
    const double ri = model.inner_radius();
    std::size_t checked = 0;
    for (int v = 0; v < render.map.height; v += 5) {
        for (int u = 0; u < render.map.width; u += 5) {
            const double z = render.map.at(u, v);
            if (!depth_valid(z)) continue;
            const Vec3 dir((u - cam.intrinsics.cx) / cam.intrinsics.fx,
                           (v - cam.intrinsics.cy) / cam.intrinsics.fy, 1.0);
            // The ray enters material at the reported depth...
            CHECK_FALSE(model.inside_material(origin + (z - 1e-6) * dir));
            // ...and the hit point sits on one of the solid's boundary
            // surfaces (outer/inner wall, cut faces, window faces, tube end).
            const NtcrModel::Local l = model.straighten(origin + z * dir);
            const double r = std::hypot(l.alpha, l.beta);
            bool on_boundary = std::abs(r - ro) < 1e-5 || std::abs(r - ri) < 1e-5 ||
                               std::abs(l.alpha - model.cut_plane()) < 1e-5 ||
                               std::abs(std::abs(l.a) - spec.tube_length / 2) < 1e-5;
            const double half_w = spec.notch_width / 2.0;
            for (const double c : model.notch_centers())
                on_boundary = on_boundary || std::abs(l.a - (c - half_w)) < 1e-5 ||
                              std::abs(l.a - (c + half_w)) < 1e-5;
            CHECK(on_boundary);
            ++checked;
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("empty frustum produces an all-invalid map and a warning flag") {
    VirtualCamera cam;
    // Camera beyond the tube looking further away: nothing in view.
    cam.pose.translation = Vec3(0, 0, -90);  // center at (0,0,+90), looking +z
    const RenderResult render = render_depth(default_spec(), cam, 6);
    CHECK(render.empty_frustum);
    CHECK(render.map.valid_count() == 0);
}

TEST_CASE("opposed rig geometry") {
    VirtualCamera tmpl;
    const auto [front, back] = make_opposed_rig(90.0, tmpl);

    CHECK((front.center() - Vec3(0, 0, -90)).norm() < 1e-9);
    CHECK((back.center() - Vec3(0, 0, 90)).norm() < 1e-9);
    CHECK((front.center() - back.center()).norm() == doctest::Approx(180.0));

    // Optical axes are anti-parallel and pass through the origin.
    const Vec3 axis_front = front.pose.rotation.transpose() * Vec3(0, 0, 1);
    const Vec3 axis_back = back.pose.rotation.transpose() * Vec3(0, 0, 1);
    CHECK(axis_front.dot(axis_back) == doctest::Approx(-1.0).epsilon(1e-12));

    // The world origin projects to the principal point of both cameras.
    for (const VirtualCamera& cam : {front, back}) {
        const auto px =
            project_point(Vec3(0, 0, 0), cam.intrinsics, cam.world_from_camera());
        REQUIRE(px.has_value());
        CHECK(px->u == doctest::Approx(cam.intrinsics.cx).epsilon(1e-6));
        CHECK(px->v == doctest::Approx(cam.intrinsics.cy).epsilon(1e-6));
        CHECK(px->z == doctest::Approx(90.0));
    }

    CHECK_THROWS_AS(make_opposed_rig(0.0, tmpl), Error);
}

TEST_CASE("scaled-rig distance property") {
    VirtualCamera tmpl;
    SequentialRng rng(9);
    for (int i = 0; i < 10; ++i) {
        const double s = rng.uniform(5.0, 500.0);
        const auto [front, back] = make_opposed_rig(s, tmpl);
        CHECK((front.center() - back.center()).norm() == doctest::Approx(2 * s));
    }
}

TEST_CASE("depth PGM round trip preserves depths to 0.01 mm") {
    VirtualCamera cam;
    cam.pose.translation = Vec3(0, 0, 90);
    const RenderResult render = render_depth(default_spec(), cam, 7);
    const std::string dir = test::scratch_dir("pgm");
    write_depth_pgm(dir + "/d.pgm", render.map);
    write_camera_meta(dir + "/d.cam", render.map);
    const DepthMap back = read_depth_map(dir + "/d.pgm", dir + "/d.cam");

    REQUIRE(back.width == render.map.width);
    REQUIRE(back.height == render.map.height);
    CHECK(back.intrinsics.fx == render.map.intrinsics.fx);
    CHECK(back.base_frame == render.map.base_frame);
    CHECK((back.camera_pose.rotation - render.map.camera_pose.rotation)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    for (std::size_t i = 0; i < back.depth.size(); ++i) {
        if (depth_valid(render.map.depth[i]))
            CHECK(std::abs(back.depth[i] - render.map.depth[i]) <= 0.005 + 1e-12);
        else
            CHECK(back.depth[i] == kInvalidDepth);
    }
}
