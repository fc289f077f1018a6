// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Foundational value types shared by every pipeline stage: points, rigid
// transforms, point clouds and triangle meshes. All coordinates are in
// millimeters. Clouds are immutable values; operations return new clouds.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ntcr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rgb = std::array<std::uint8_t, 3>;

// Orthonormality tolerance on R*R^T - I entries for every rotation produced
// anywhere in the pipeline.
inline constexpr double kRotationTolerance = 1e-9;

// Proper rigid motion p -> R*p + t.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return {}; }

    Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

    // Composition: (a * b) * p == a * (b * p).
    RigidTransform operator*(const RigidTransform& other) const {
        return {rotation * other.rotation,
                rotation * other.translation + translation};
    }

    RigidTransform inverse() const {
        const Mat3 rt = rotation.transpose();
        return {rt, -(rt * translation)};
    }
};

// True iff R is orthonormal with det +1 within tol and t is finite.
bool is_rigid(const RigidTransform& t, double tol = kRotationTolerance);

// Rotation about a (not necessarily unit) axis by angle in radians.
RigidTransform rotation_about(const Vec3& axis, double angle_rad,
                              const Vec3& translation = Vec3::Zero());

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Rgb> colors;    // empty or one per point
    std::vector<Vec3> normals;  // empty or one per point, unit length
    std::string frame;          // coordinate frame label

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }
    bool has_normals() const { return !normals.empty(); }
};

// Throws Error(InvalidArgument) on NaN/Inf coordinates, attribute length
// mismatch, or non-unit normals (tolerance 1e-6).
void validate_cloud(const PointCloud& cloud);

// R*p + t for every point; normals rotated by R; colors preserved; the frame
// label is replaced by target_frame.
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t,
                           const std::string& target_frame);

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

// Throws on out-of-range indices or triangles with a repeated vertex index.
void validate_mesh(const TriangleMesh& mesh);

struct Box3 {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    bool valid() const { return (min.array() <= max.array()).all(); }
    void expand(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
};

Box3 bounding_box(const std::vector<Vec3>& points);

}  // namespace ntcr
