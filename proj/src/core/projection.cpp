// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "projection.hpp"

#include <algorithm>

#include "error.hpp"

namespace ntcr {

std::size_t DepthMap::valid_count() const {
    return static_cast<std::size_t>(
        std::count_if(depth.begin(), depth.end(), depth_valid));
}

void validate_depth_map(const DepthMap& map) {
    if (map.width <= 0 || map.height <= 0)
        fail(ErrorCode::InvalidArgument, "depth map dimensions must be positive");
    if (map.depth.size() != static_cast<std::size_t>(map.width) * map.height)
        fail(ErrorCode::InvalidArgument, "depth array length != width*height");
    if (map.intrinsics.fx <= 0 || map.intrinsics.fy <= 0)
        fail(ErrorCode::InvalidArgument, "focal lengths must be positive");
    if (map.intrinsics.cx < 0 || map.intrinsics.cx > map.width - 1 ||
        map.intrinsics.cy < 0 || map.intrinsics.cy > map.height - 1)
        fail(ErrorCode::InvalidArgument, "principal point outside image bounds");
    for (const double d : map.depth) {
        if (!(d >= 0.0) || !std::isfinite(d))
            fail(ErrorCode::InvalidArgument, "depth values must be finite and >= 0");
    }
}

double disparity_to_depth(double disparity_px, const StereoGeometry& g) {
    if (disparity_px < 0)
        fail(ErrorCode::InvalidArgument, "disparity must be non-negative");
    if (disparity_px == 0) return kInvalidDepth;
    return g.baseline * g.focal / disparity_px;
}

double depth_to_disparity(double depth_mm, const StereoGeometry& g) {
    if (!depth_valid(depth_mm))
        fail(ErrorCode::InvalidArgument, "depth must be > 0");
    return g.baseline * g.focal / depth_mm;
}

CloudFromDepthResult depth_to_cloud(const DepthMap& map) {
    validate_depth_map(map);
    CloudFromDepthResult result;
    result.cloud.frame = map.base_frame;
    result.cloud.points.reserve(map.valid_count());

    const CameraIntrinsics& k = map.intrinsics;
    for (int v = 0; v < map.height; ++v) {
        for (int u = 0; u < map.width; ++u) {
            const double z = map.at(u, v);
            if (!depth_valid(z)) continue;
            const Vec3 p_cam((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
            result.cloud.points.push_back(map.camera_pose * p_cam);
        }
    }
    if (result.cloud.empty())
        result.warnings.push_back("depth map has no valid pixels; cloud is empty");
    return result;
}

std::optional<PixelDepth> project_point(const Vec3& p_base,
                                        const CameraIntrinsics& intr,
                                        const RigidTransform& world_from_camera) {
    const Vec3 p_cam = world_from_camera.inverse() * p_base;
    if (!(p_cam.z() > 0)) return std::nullopt;
    return PixelDepth{intr.fx * p_cam.x() / p_cam.z() + intr.cx,
                      intr.fy * p_cam.y() / p_cam.z() + intr.cy, p_cam.z()};
}

PointCloud merge_clouds(const PointCloud& a, const PointCloud& b) {
    if (!a.empty() && !b.empty() && a.frame != b.frame)
        fail(ErrorCode::InvalidArgument,
             "cannot merge clouds in different frames ('" + a.frame + "' vs '" +
                 b.frame + "')");

    PointCloud out;
    out.frame = a.empty() ? b.frame : a.frame;
    out.points.reserve(a.size() + b.size());
    out.points.insert(out.points.end(), a.points.begin(), a.points.end());
    out.points.insert(out.points.end(), b.points.begin(), b.points.end());

    const bool colors = (a.has_colors() || a.empty()) && (b.has_colors() || b.empty()) &&
                        (a.has_colors() || b.has_colors());
    if (colors) {
        out.colors.reserve(out.points.size());
        out.colors.insert(out.colors.end(), a.colors.begin(), a.colors.end());
        out.colors.insert(out.colors.end(), b.colors.begin(), b.colors.end());
    }
    const bool normals = (a.has_normals() || a.empty()) &&
                         (b.has_normals() || b.empty()) &&
                         (a.has_normals() || b.has_normals());
    if (normals) {
        out.normals.reserve(out.points.size());
        out.normals.insert(out.normals.end(), a.normals.begin(), a.normals.end());
        out.normals.insert(out.normals.end(), b.normals.begin(), b.normals.end());
    }
    return out;
}

}  // namespace ntcr
