// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stage orchestration. Every stage reads and writes files under one output
// directory with fixed artifact names, and the monolithic pipeline is
// literally the chain of stage functions, so running the stages one by one
// produces byte-identical artifacts.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace ntcr {

// Canonical artifact names inside the output directory.
namespace artifact {
std::string depth_pgm(int cam);    // cam<N>_depth.pgm
std::string camera_meta(int cam);  // cam<N>.cam
std::string raw_cloud(int cam);    // cloud_cam<N>.ply
std::string sor_cloud(int cam);    // cloud_sor_cam<N>.ply
std::string sor_report(int cam);   // sor_removed_cam<N>.csv
std::string cond_cloud(int cam);   // cloud_cond_cam<N>.ply
inline const std::string kMerged = "cloud_merged.ply";
inline const std::string kSmoothed = "cloud_smoothed.ply";
inline const std::string kReference = "reference.ply";
inline const std::string kAligned = "cloud_aligned.ply";
inline const std::string kIcpReport = "icp_report.csv";
inline const std::string kMeshPly = "mesh.ply";
inline const std::string kMeshObj = "mesh.obj";
inline const std::string kPdcCsv = "pdc.csv";
inline const std::string kPdcTxt = "pdc.txt";
inline const std::string kHeatmapCsv = "heatmap.csv";
inline const std::string kHeatmapPgm = "heatmap.pgm";
inline const std::string kNotchCsv = "notch.csv";
inline const std::string kNotchTxt = "notch.txt";
inline const std::string kManifest = "manifest.txt";
}  // namespace artifact

struct StageRecord {
    std::string name;
    double millis = 0.0;
    std::vector<std::string> files;  // artifact names relative to out_dir
    std::string note;
};

struct Manifest {
    std::vector<StageRecord> stages;
    bool ok = true;
    std::string error_stage;
    std::string error_message;

    std::string text() const;
};

// Optional explicit inputs for single-stage (subcommand) runs. Paths may be
// absolute or relative to the working directory.
struct StageOverrides {
    std::vector<std::string> inputs;  // PLY inputs
    std::string depth_path;           // project: single-pair mode
    std::string camera_path;
};

// Individual stages; each appends its record(s) to the manifest and throws
// Error on failure.
void stage_synth(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m);
void stage_project(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                   const StageOverrides* ov = nullptr);
void stage_filter(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                  const StageOverrides* ov = nullptr);
void stage_register(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                    const StageOverrides* ov = nullptr);
void stage_reconstruct(const PipelineConfig& cfg, const std::string& out_dir,
                       Manifest& m, const StageOverrides* ov = nullptr);
void stage_metrics(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                   const StageOverrides* ov = nullptr);

// Runs synth -> project -> filter -> register -> reconstruct -> metrics.
// enable_icp=false skips relocation (the CLI --no-icp switch); downstream
// stages then run on the merged/smoothed cloud. On stage failure the
// manifest of completed artifacts is written and returned with ok=false.
Manifest run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                      bool enable_icp = true);

}  // namespace ntcr
