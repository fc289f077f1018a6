// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>

#include "geometry.hpp"
#include "projection.hpp"

namespace ntcr {

// Synthetic stereo depth camera. `pose` is camera-from-world; the camera
// looks along its +z axis.
struct VirtualCamera {
    CameraIntrinsics intrinsics{380.0, 380.0, 319.5, 239.5};
    RigidTransform pose;  // camera-from-world
    int width = 640;
    int height = 480;
    double stereo_baseline = 18.0;       // mm
    double depth_noise_fraction = 0.004; // sigma of multiplicative depth noise
    double disparity_quantization = 0.125;  // px, 0 disables

    Vec3 center() const { return pose.inverse().translation; }
    RigidTransform world_from_camera() const { return pose.inverse(); }
};

void validate_camera(const VirtualCamera& cam);

// Two cameras on opposite sides of the origin along the z axis, optical axes
// anti-parallel through the origin, each at distance `standoff`. The first
// sits at (0,0,-standoff) looking +z, the second at (0,0,+standoff) looking
// -z (world-rotated 180 degrees about y).
std::pair<VirtualCamera, VirtualCamera> make_opposed_rig(
    double standoff, const VirtualCamera& camera_template);

}  // namespace ntcr
