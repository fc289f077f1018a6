// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "camera.hpp"

#include "error.hpp"

namespace ntcr {

void validate_camera(const VirtualCamera& cam) {
    if (cam.width <= 0 || cam.height <= 0)
        fail(ErrorCode::InvalidArgument, "camera image size must be positive");
    if (!(cam.intrinsics.fx > 0) || !(cam.intrinsics.fy > 0))
        fail(ErrorCode::InvalidArgument, "camera focal lengths must be positive");
    if (!(cam.stereo_baseline > 0))
        fail(ErrorCode::InvalidArgument, "stereo baseline must be positive");
    if (cam.depth_noise_fraction < 0)
        fail(ErrorCode::InvalidArgument, "depth noise fraction must be >= 0");
    if (cam.disparity_quantization < 0)
        fail(ErrorCode::InvalidArgument, "disparity quantization must be >= 0");
    if (!is_rigid(cam.pose))
        fail(ErrorCode::InvalidArgument, "camera pose is not a rigid transform");
}

std::pair<VirtualCamera, VirtualCamera> make_opposed_rig(
    double standoff, const VirtualCamera& camera_template) {
    if (!(standoff > 0))
        fail(ErrorCode::InvalidArgument, "rig standoff must be positive");

    VirtualCamera front = camera_template;
    front.pose.rotation = Mat3::Identity();
    front.pose.translation = Vec3(0, 0, standoff);

    VirtualCamera back = camera_template;
    // Exact 180-degree rotation about y.
    back.pose.rotation = Vec3(-1, 1, -1).asDiagonal();
    back.pose.translation = Vec3(0, 0, standoff);

    validate_camera(front);
    validate_camera(back);
    return {front, back};
}

}  // namespace ntcr
