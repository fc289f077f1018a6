// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pinhole conversions between depth maps and 3D point clouds, and merging of
// multi-camera clouds into the shared base frame.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace ntcr {

// Reserved sentinel for pixels with no depth. Valid depths are > 0, so zero
// keeps maps totally ordered and serializable (and matches the PGM export).
inline constexpr double kInvalidDepth = 0.0;

inline bool depth_valid(double d) { return d > 0.0; }

struct CameraIntrinsics {
    double fx = 1.0;  // px
    double fy = 1.0;  // px
    double cx = 0.0;  // px
    double cy = 0.0;  // px
};

struct StereoGeometry {
    double baseline = 1.0;  // mm
    double focal = 1.0;     // px
};

struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> depth;  // row-major, mm; kInvalidDepth marks holes
    CameraIntrinsics intrinsics;
    RigidTransform camera_pose;  // world-from-camera
    std::string base_frame = "base";

    double& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
    double at(int u, int v) const {
        return depth[static_cast<std::size_t>(v) * width + u];
    }
    std::size_t valid_count() const;
};

// Throws on inconsistent dimensions, negative depths, or intrinsics whose
// principal point falls outside the image.
void validate_depth_map(const DepthMap& map);

// Z = b*f/d. Zero disparity maps to the invalid marker (point at infinity);
// negative disparity is an error.
double disparity_to_depth(double disparity_px, const StereoGeometry& g);

// Inverse of disparity_to_depth for valid depths.
double depth_to_disparity(double depth_mm, const StereoGeometry& g);

struct CloudFromDepthResult {
    PointCloud cloud;
    std::vector<std::string> warnings;
};

// Back-projects every valid pixel through the intrinsics and transforms it
// into the base frame by the camera pose. Output order is row-major over
// valid pixels. An all-invalid map yields an empty cloud plus a warning.
CloudFromDepthResult depth_to_cloud(const DepthMap& map);

// Forward projection of a base-frame point into pixel (u, v) and camera
// depth Z. Returns nullopt when the point is at or behind the camera plane.
struct PixelDepth {
    double u;
    double v;
    double z;
};
std::optional<PixelDepth> project_point(const Vec3& p_base,
                                        const CameraIntrinsics& intr,
                                        const RigidTransform& world_from_camera);

// Concatenation preserving per-point attributes; a's points precede b's.
// Requires matching frame labels. An attribute survives only when both
// inputs carry it (empty clouds are compatible with anything).
PointCloud merge_clouds(const PointCloud& a, const PointCloud& b);

}  // namespace ntcr
