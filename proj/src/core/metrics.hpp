// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Quantitative evaluation of reconstructed clouds: point-density consistency
// (coefficient of variation of per-voxel counts), 2D density heatmaps, and
// notch-width measurement against the tube's nominal cut width.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "ntcr_model.hpp"

namespace ntcr {

struct PdcReport {
    double mean_density = 0.0;  // points per voxel over the full bounding grid
    double std_density = 0.0;   // population standard deviation
    double lambda = 0.0;        // std / mean
    double voxel_size = 0.0;
    std::size_t occupied_voxel_count = 0;
    std::size_t total_voxel_count = 0;
    std::size_t point_count = 0;
    bool degenerate = false;  // single-point cloud
};

// Coefficient of variation of per-voxel counts.
inline double pdc_lambda(double mean_density, double std_density) {
    return mean_density > 0 ? std_density / mean_density : 0.0;
}

// Voxelizes the cloud's tight axis-aligned bounding box (lattice anchored at
// the minimum corner) and reports count statistics over ALL voxels of that
// box, so sparse clouds can have mean < 1.
PdcReport compute_pdc(const PointCloud& cloud, double voxel_size);

struct Heatmap {
    int axis_u = 0;  // 0=x, 1=y, 2=z
    int axis_v = 1;
    double cell_size = 0.5;
    double origin_u = 0.0;
    double origin_v = 0.0;
    int nu = 0, nv = 0;
    std::vector<std::uint64_t> counts;  // u-fastest

    std::uint64_t at(int u, int v) const {
        return counts[static_cast<std::size_t>(v) * nu + u];
    }
};

// Counts of points projected onto the chosen axis-aligned plane.
Heatmap density_heatmap(const PointCloud& cloud, int axis_u, int axis_v,
                        double cell_size);

void write_heatmap_csv(const std::string& path, const Heatmap& hm);
// Grayscale PGM, counts normalized to the maximum cell.
void write_heatmap_pgm(const std::string& path, const Heatmap& hm);

struct NotchMeasurement {
    int index = 0;
    double width = 0.0;  // mm; 0 when not observable
    bool observable = false;
};

struct NotchReport {
    std::vector<NotchMeasurement> notches;
    std::size_t observable_count = 0;
    double mean_width = 0.0;
    double median_width = 0.0;
    double std_width = 0.0;    // population, over observable notches
    double standard_width = 0.0;  // nominal cut width from the spec
    bool empty = false;        // no notches in the spec
};

// Measures notch widths on a cloud aligned to the reference frame: points
// are straightened by inverting the constant-curvature bend, the cut-side
// points are binned into an axial occupancy histogram (0.1 mm bins), a notch
// is observable when a contiguous low-occupancy run (below 20% of the median
// occupied-bin count) overlaps its expected window, and the width is the
// run extent refined by interpolating the half-plateau crossings.
NotchReport measure_notches(const PointCloud& cloud, const NtcrSpec& spec);

std::string pdc_report_text(const PdcReport& report);
void write_pdc_csv(const std::string& path, const PdcReport& report);
std::string notch_report_text(const NotchReport& report);
void write_notch_csv(const std::string& path, const NotchReport& report);

}  // namespace ntcr
