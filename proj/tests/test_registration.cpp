// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "camera.hpp"
#include "error.hpp"
#include "projection.hpp"
#include "registration.hpp"
#include "render.hpp"
#include "test_util.hpp"

using namespace ntcr;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rotation_angle(const Mat3& r) {
    // atan2 of the axis-vector magnitude keeps precision for tiny angles,
    // where acos((trace-1)/2) bottoms out at sqrt(machine epsilon).
    const Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    const double s = 0.5 * axis.norm();
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::atan2(s, c);
}

RigidTransform euler_xyz(double rx, double ry, double rz, const Vec3& t) {
    RigidTransform out;
    out.rotation = (Eigen::AngleAxisd(rz, Vec3::UnitZ()) *
                    Eigen::AngleAxisd(ry, Vec3::UnitY()) *
                    Eigen::AngleAxisd(rx, Vec3::UnitX()))
                       .toRotationMatrix();
    out.translation = t;
    return out;
}

}  // namespace

TEST_CASE("closed-form solver recovers an exact transform to 1e-9") {
    SequentialRng rng(1);
    for (int round = 0; round < 25; ++round) {
        const RigidTransform truth =
            euler_xyz(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
                      Vec3(rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8)));
        const auto src = test::random_points(50, 100 + round);
        std::vector<Vec3> dst(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = truth * src[i];

        const RigidTransform est = solve_rigid_transform(src, dst);
        CHECK(rotation_angle(est.rotation.transpose() * truth.rotation) <= 1e-9);
        CHECK((est.translation - truth.translation).norm() <= 1e-9);
        CHECK(is_rigid(est));
    }
}

TEST_CASE("solver output never contains a reflection") {
    // Noisy nearly planar sets are the classic trigger for det = -1.
    SequentialRng rng(2);
    for (int round = 0; round < 50; ++round) {
        std::vector<Vec3> src, dst;
        for (int i = 0; i < 12; ++i) {
            const Vec3 p(rng.uniform(-5, 5), rng.uniform(-5, 5),
                         0.001 * rng.normal());
            src.push_back(p);
            dst.push_back(Vec3(-p.x() + 0.3 * rng.normal(), p.y() + 0.3 * rng.normal(),
                               -p.z() + 0.3 * rng.normal()));
        }
        const RigidTransform est = solve_rigid_transform(src, dst);
        CHECK(est.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("collinear correspondences fail naming the degenerate axis") {
    std::vector<Vec3> src, dst;
    for (int i = 0; i < 10; ++i) {
        src.push_back(Vec3(0, static_cast<double>(i), 0));
        dst.push_back(Vec3(0, static_cast<double>(i), 0));
    }
    try {
        solve_rigid_transform(src, dst);
        FAIL("expected degeneracy error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("y axis") != std::string::npos);
    }
}

TEST_CASE("fewer than three pairs is an error") {
    const std::vector<Vec3> two = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    CHECK_THROWS_AS(solve_rigid_transform(two, two), Error);
}

TEST_CASE("self-alignment converges immediately to the identity") {
    const NtcrSpec spec;
    const PointCloud reference = sample_ntcr_surface(spec, 20.0);
    const IcpResult result = icp_align(reference, reference, IcpParams{});
    CHECK(result.converged);
    CHECK(result.iterations_used == 1);
    CHECK(result.rms_residual <= 1e-9);
    CHECK(rotation_angle(result.transform.rotation) <= 1e-9);
    CHECK(result.transform.translation.norm() <= 1e-9);
}

TEST_CASE("ICP recovers a known perturbation of the tube cloud") {
    const NtcrSpec spec;
    const PointCloud reference = sample_ntcr_surface(spec, 60.0);
    const double deg5 = 5.0 * kPi / 180.0;
    const RigidTransform t0 = euler_xyz(deg5, deg5, deg5, Vec3(1, 2, 3));

    PointCloud target = apply_transform(reference, t0, "base");
    SequentialRng rng(3);
    for (Vec3& p : target.points)
        p += 0.01 * Vec3(rng.normal(), rng.normal(), rng.normal());

    const IcpResult result = icp_align(target, reference, IcpParams{});
    // transform(t0(p)) should be p again.
    const RigidTransform closure = result.transform * t0;
    const double rot_err_deg = rotation_angle(closure.rotation) * 180.0 / kPi;
    const double trans_err = closure.translation.norm();
    MESSAGE("icp closure: ", rot_err_deg, " deg, ", trans_err, " mm, iters ",
            result.iterations_used);
    CHECK(rot_err_deg <= 0.5);
    CHECK(trans_err <= 0.05);
    CHECK(result.rms_residual < 0.2);
}

TEST_CASE("residual trace is non-increasing") {
    const NtcrSpec spec;
    const PointCloud reference = sample_ntcr_surface(spec, 40.0);
    const RigidTransform t0 =
        euler_xyz(0.05, -0.04, 0.06, Vec3(0.5, -0.8, 0.4));
    PointCloud target = apply_transform(reference, t0, "base");
    SequentialRng rng(4);
    for (Vec3& p : target.points)
        p += 0.02 * Vec3(rng.normal(), rng.normal(), rng.normal());

    const IcpResult result = icp_align(target, reference, IcpParams{});
    REQUIRE(result.residual_trace.size() >= 2);
    for (std::size_t i = 1; i < result.residual_trace.size(); ++i)
        CHECK(result.residual_trace[i] <= result.residual_trace[i - 1] + 1e-9);
    CHECK(result.rms_residual ==
          doctest::Approx(result.residual_trace.back()).epsilon(1e-12));
}

TEST_CASE("single-camera half cloud aligns against the full reference") {
    // Render one camera of the default scene and align its (partial-view)
    // cloud; the residual should stay within twice the injected depth noise.
    const NtcrSpec spec;
    VirtualCamera tmpl;
    const auto [front, back] = make_opposed_rig(90.0, tmpl);
    const RenderResult render = render_depth(spec, back, 5);
    PointCloud capture = depth_to_cloud(render.map).cloud;
    REQUIRE(capture.size() > 1000);

    const auto [aligned, result] = relocate_to_reference(capture, spec, IcpParams{});
    CHECK(result.converged);
    const double sigma = tmpl.depth_noise_fraction * 90.0;  // ~0.36 mm
    CHECK(result.rms_residual <= 2.0 * sigma);
    CHECK(aligned.frame == kReferenceFrame);
}

TEST_CASE("relocating an already aligned capture is a near-identity") {
    const NtcrSpec spec;
    PointCloud capture = sample_ntcr_surface(spec, 25.0);
    capture.frame = "base";
    capture.normals.clear();
    const auto [aligned, result] = relocate_to_reference(capture, spec, IcpParams{});
    CHECK(result.converged);
    CHECK(rotation_angle(result.transform.rotation) * 180.0 / kPi <= 0.1);
    CHECK(result.transform.translation.norm() <= 0.05);
    CHECK(aligned.frame == kReferenceFrame);
}

TEST_CASE("curvature mismatch is flagged instead of silently passing") {
    NtcrSpec straight;
    straight.bend_curvature = 0.0;
    NtcrSpec bent = straight;
    bent.bend_curvature = 0.018;  // strong bend: tip deviates several mm

    PointCloud capture = sample_ntcr_surface(straight, 25.0);
    capture.frame = "base";
    capture.normals.clear();
    const auto [aligned, result] = relocate_to_reference(capture, bent, IcpParams{});
    // The model mismatch must be visible: either no convergence or a residual
    // far above the sampling noise floor.
    CHECK((!result.converged || result.rms_residual > 0.1));
}

TEST_CASE("too-distant clouds starve the correspondence set") {
    PointCloud target = test::random_cloud(50, 6, "base", 0, 1);
    PointCloud reference = test::random_cloud(50, 7, "base", 1000, 1001);
    IcpParams params;
    params.max_correspondence_distance = 2.0;
    try {
        icp_align(target, reference, params);
        FAIL("expected starvation error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
    }
}

TEST_CASE("ICP parameter validation") {
    const PointCloud cloud = test::random_cloud(10, 8);
    IcpParams params;
    params.max_iterations = 0;
    CHECK_THROWS_AS(icp_align(cloud, cloud, params), Error);
    params = IcpParams{};
    params.convergence_eps = 0.0;
    CHECK_THROWS_AS(icp_align(cloud, cloud, params), Error);
    params = IcpParams{};
    params.max_correspondence_distance = 0.0;
    CHECK_THROWS_AS(icp_align(cloud, cloud, params), Error);
    CHECK_THROWS_AS(relocate_to_reference(PointCloud{}, NtcrSpec{}, IcpParams{}),
                    Error);
}

TEST_CASE("icp report lists the residual trace") {
    const NtcrSpec spec;
    const PointCloud reference = sample_ntcr_surface(spec, 20.0);
    const IcpResult result = icp_align(reference, reference, IcpParams{});
    const std::string dir = test::scratch_dir("icp_report");
    write_icp_report(dir + "/icp.csv", result);
    std::ifstream in(dir + "/icp.csv");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("iteration,rms_residual") != std::string::npos);
    CHECK(text.find("converged=1") != std::string::npos);
}
