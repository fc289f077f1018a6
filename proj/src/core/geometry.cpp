// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "geometry.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace ntcr {

bool is_rigid(const RigidTransform& t, double tol) {
    if (!t.translation.allFinite() || !t.rotation.allFinite()) return false;
    const Mat3 gram = t.rotation * t.rotation.transpose() - Mat3::Identity();
    if (gram.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(t.rotation.determinant() - 1.0) <= tol;
}

RigidTransform rotation_about(const Vec3& axis, double angle_rad,
                              const Vec3& translation) {
    const double n = axis.norm();
    if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "rotation axis must be nonzero");
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
    t.translation = translation;
    return t;
}

void validate_cloud(const PointCloud& cloud) {
    for (const Vec3& p : cloud.points) {
        if (!p.allFinite())
            fail(ErrorCode::InvalidArgument, "cloud contains non-finite coordinates");
    }
    if (cloud.has_colors() && cloud.colors.size() != cloud.points.size())
        fail(ErrorCode::InvalidArgument, "color array length does not match point count");
    if (cloud.has_normals()) {
        if (cloud.normals.size() != cloud.points.size())
            fail(ErrorCode::InvalidArgument, "normal array length does not match point count");
        for (const Vec3& n : cloud.normals) {
            if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6)
                fail(ErrorCode::InvalidArgument, "normals must be unit length");
        }
    }
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t,
                           const std::string& target_frame) {
    PointCloud out;
    out.points.resize(cloud.points.size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        out.points[i] = t * cloud.points[i];
    if (cloud.has_normals()) {
        out.normals.resize(cloud.normals.size());
        for (std::size_t i = 0; i < cloud.normals.size(); ++i)
            out.normals[i] = t.rotation * cloud.normals[i];
    }
    out.colors = cloud.colors;
    out.frame = target_frame;
    return out;
}

void validate_mesh(const TriangleMesh& mesh) {
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.vertices.size());
    for (const auto& tri : mesh.triangles) {
        for (const std::uint32_t idx : tri) {
            if (idx >= n) fail(ErrorCode::InvalidArgument, "triangle index out of range");
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            fail(ErrorCode::InvalidArgument, "degenerate triangle (repeated vertex index)");
    }
}

Box3 bounding_box(const std::vector<Vec3>& points) {
    Box3 box;
    for (const Vec3& p : points) box.expand(p);
    return box;
}

}  // namespace ntcr
