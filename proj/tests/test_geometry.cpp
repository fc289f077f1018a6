// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "error.hpp"
#include "geometry.hpp"
#include "test_util.hpp"

using namespace ntcr;

namespace {

RigidTransform sample_transform(std::uint64_t seed) {
    SequentialRng rng(seed);
    const Vec3 axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 t(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    return rotation_about(axis, rng.uniform(-3, 3), t);
}

}  // namespace

TEST_CASE("identity transform leaves a cloud unchanged") {
    PointCloud cloud = test::random_cloud(50, 1);
    cloud.normals.assign(50, Vec3(0, 0, 1));
    cloud.colors.assign(50, Rgb{10, 20, 30});
    const PointCloud out = apply_transform(cloud, RigidTransform::identity(), "base");
    REQUIRE(out.size() == cloud.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out.points[i] == cloud.points[i]);
        CHECK(out.normals[i] == cloud.normals[i]);
        CHECK(out.colors[i] == cloud.colors[i]);
    }
}

TEST_CASE("90 degree rotation about z maps x to y") {
    PointCloud cloud;
    cloud.points = {Vec3(1, 0, 0)};
    const RigidTransform t = rotation_about(Vec3(0, 0, 1), 3.14159265358979323846 / 2);
    const PointCloud out = apply_transform(cloud, t, "rot");
    CHECK((out.points[0] - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(out.frame == "rot");
}

TEST_CASE("transform round trip through the computed inverse") {
    const PointCloud cloud = test::random_cloud(100, 2);
    const RigidTransform t = sample_transform(3);
    const PointCloud back =
        apply_transform(apply_transform(cloud, t, "a"), t.inverse(), "base");
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(back.points[i][c] == doctest::Approx(cloud.points[i][c]).epsilon(1e-9));
}

TEST_CASE("compose: identity is the neutral element and inverses cancel") {
    const RigidTransform b = sample_transform(4);
    const RigidTransform ib = RigidTransform::identity() * b;
    CHECK((ib.rotation - b.rotation).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((ib.translation - b.translation).norm() < 1e-15);

    const RigidTransform cancel = b * b.inverse();
    CHECK((cancel.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cancel.translation.norm() < 1e-12);
}

TEST_CASE("compose is associative on sampled points") {
    const RigidTransform a = sample_transform(5);
    const RigidTransform b = sample_transform(6);
    const RigidTransform c = sample_transform(7);
    const RigidTransform left = (a * b) * c;
    const RigidTransform right = a * (b * c);
    for (const Vec3& p : test::random_points(20, 8))
        CHECK((left * p - right * p).norm() < 1e-9);
}

TEST_CASE("produced rotations stay orthonormal with det +1") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        RigidTransform t = sample_transform(seed + 100);
        t = t * sample_transform(seed + 200);
        t = t * t.inverse() * t;  // extra churn
        CHECK(is_rigid(t));
        CHECK((t.rotation * t.rotation.transpose() - Mat3::Identity())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-9);
        CHECK(t.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("apply_transform preserves pairwise distances") {
    const std::vector<Vec3> pts = test::random_points(40, 9);
    const RigidTransform t = sample_transform(10);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        const double before = (pts[i] - pts[i + 1]).norm();
        const double after = (t * pts[i] - t * pts[i + 1]).norm();
        CHECK(std::abs(after - before) <= 1e-9 * (1.0 + before));
    }
}

TEST_CASE("normals rotate with the cloud") {
    PointCloud cloud;
    cloud.points = {Vec3(0, 0, 0)};
    cloud.normals = {Vec3(1, 0, 0)};
    const RigidTransform t = rotation_about(Vec3(0, 0, 1), 3.14159265358979323846 / 2);
    const PointCloud out = apply_transform(cloud, t, "r");
    CHECK((out.normals[0] - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(out.normals[0].norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cloud validation rejects bad payloads") {
    PointCloud cloud = test::random_cloud(5, 11);
    CHECK_NOTHROW(validate_cloud(cloud));

    PointCloud nan_cloud = cloud;
    nan_cloud.points[2].y() = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate_cloud(nan_cloud), Error);

    PointCloud short_colors = cloud;
    short_colors.colors.assign(3, Rgb{0, 0, 0});
    CHECK_THROWS_AS(validate_cloud(short_colors), Error);

    PointCloud bad_normals = cloud;
    bad_normals.normals.assign(5, Vec3(1, 1, 0));  // not unit
    CHECK_THROWS_AS(validate_cloud(bad_normals), Error);
}

TEST_CASE("mesh validation rejects bad indices and degenerate triangles") {
    TriangleMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    mesh.triangles = {{0, 1, 2}};
    CHECK_NOTHROW(validate_mesh(mesh));

    TriangleMesh out_of_range = mesh;
    out_of_range.triangles = {{0, 1, 3}};
    CHECK_THROWS_AS(validate_mesh(out_of_range), Error);

    TriangleMesh degenerate = mesh;
    degenerate.triangles = {{0, 1, 1}};
    CHECK_THROWS_AS(validate_mesh(degenerate), Error);
}

TEST_CASE("is_rigid spots reflections and scaling") {
    RigidTransform reflect;
    reflect.rotation = Vec3(-1, 1, 1).asDiagonal();  // det -1
    CHECK_FALSE(is_rigid(reflect));

    RigidTransform scaled;
    scaled.rotation = Mat3::Identity() * 1.001;
    CHECK_FALSE(is_rigid(scaled));
}
