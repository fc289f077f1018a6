// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline configuration: a plain-text sectioned key-value file with every
// default embedded, so a bare run reproduces the standard synthetic scenario.

#pragma once

#include <cstdint>
#include <string>

#include "camera.hpp"
#include "filtering.hpp"
#include "ntcr_model.hpp"
#include "ply_io.hpp"
#include "registration.hpp"
#include "surface_recon.hpp"

namespace ntcr {

struct PipelineConfig {
    NtcrSpec ntcr;  // [ntcr]

    // [rig]
    double rig_standoff = 90.0;  // mm
    std::uint64_t seed = 1;
    // Per-camera extrinsic calibration error applied to the *estimated*
    // camera poses (the depth maps are rendered from the true poses), the
    // way an adjustable physical rig is only roughly calibrated.
    double rig_pose_error_deg = 1.2;
    double rig_pose_error_mm = 0.4;
    bool rig_backdrop = true;

    // [camera] template; poses are assigned by the rig
    VirtualCamera camera;

    // [filter.*]
    bool sor_enabled = true;
    SorParams sor;
    ConditionalParams conditional;
    bool mls_enabled = true;
    MlsParams mls;

    // [icp]
    bool icp_enabled = true;
    IcpParams icp;

    // [recon]
    double recon_voxel_size = 0.25;  // mm
    std::size_t recon_max_cells = 20'000'000;
    int recon_normal_k = 16;

    // [metrics]
    double pdc_voxel_size = 0.5;  // mm
    int heatmap_axis_u = 0;
    int heatmap_axis_v = 1;
    double heatmap_cell_size = 0.5;  // mm

    // [io] optional pre-rendered inputs; when set the synth stage ingests
    // these instead of rendering.
    std::string input_depth0, input_camera0;
    std::string input_depth1, input_camera1;
    PlyFormat ply_format = PlyFormat::BinaryLittleEndian;
};

PipelineConfig default_config();

// Parses the file over the defaults. Unknown keys and malformed values raise
// Error(Config).
PipelineConfig load_config(const std::string& path);

// Applies one "section.key=value"-style override.
void apply_config_override(PipelineConfig& cfg, const std::string& key,
                           const std::string& value);

// Canonical dump; load_config(dump) round-trips.
std::string dump_config(const PipelineConfig& cfg);

// Cross-checks every section against its module's invariants.
void validate_config(const PipelineConfig& cfg);

}  // namespace ntcr
