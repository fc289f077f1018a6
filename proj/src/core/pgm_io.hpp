// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Depth-map interchange: 16-bit binary PGM with depth in 0.01 mm units
// (0 = invalid) plus a plain-text sidecar carrying intrinsics and the
// world-from-camera pose, so a depth map round-trips through files.

#pragma once

#include <string>
#include <vector>

#include "projection.hpp"

namespace ntcr {

// Writes map.depth as P5/65535. Depths above 655.35 mm saturate.
void write_depth_pgm(const std::string& path, const DepthMap& map);

// Reads the pixel payload only; intrinsics/pose come from the sidecar.
struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> pixels;  // row-major
};
PgmImage read_pgm16(const std::string& path);

// 8-bit P5 export used for heatmaps.
void write_pgm8(const std::string& path, int width, int height,
                const std::vector<std::uint8_t>& pixels);

void write_camera_meta(const std::string& path, const DepthMap& map);

// Loads sidecar + PGM into a full DepthMap.
DepthMap read_depth_map(const std::string& pgm_path, const std::string& meta_path);

}  // namespace ntcr
