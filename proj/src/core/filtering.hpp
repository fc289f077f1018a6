// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Three-stage point cloud cleanup: statistical outlier removal, conditional
// (spatial box / color range) filtering, and moving-least-squares smoothing.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geometry.hpp"

namespace ntcr {

struct SorParams {
    int k = 20;          // neighbor count
    double alpha = 1.0;  // std-dev multiplier in the mu + alpha*sigma threshold
};

struct ColorRange {
    Rgb min{0, 0, 0};
    Rgb max{255, 255, 255};
};

struct ConditionalParams {
    std::optional<Box3> spatial_box;
    std::optional<ColorRange> color_range;
};

struct MlsParams {
    double radius = 1.0;        // neighborhood radius, mm
    int polynomial_order = 2;   // 1 or 2
    double weight_sigma = 0.5;  // Gaussian weight scale, mm
};

struct SorResult {
    PointCloud cloud;
    std::vector<std::size_t> removed_indices;  // ascending
    // Mean k-NN distance per input point, in input order (for the CSV report).
    std::vector<double> mean_neighbor_distance;
    double threshold = 0.0;  // mu + alpha*sigma actually applied
};

// Keeps points whose mean distance to their k nearest neighbors is at most
// mu + alpha*sigma, where mu/sigma are the mean and population standard
// deviation of those per-point means over the whole cloud.
// Requires cloud size > k >= 1.
SorResult sor_filter(const PointCloud& cloud, const SorParams& params);

// Retains points inside the spatial box AND inside the color range; absent
// criteria pass everything. Order preserved; idempotent.
PointCloud conditional_filter(const PointCloud& cloud, const ConditionalParams& params);

struct MlsResult {
    PointCloud cloud;
    // Points left untouched for lack of neighbors (or an unstable fit).
    std::size_t passed_through = 0;
};

// Projects each point onto a local weighted least-squares polynomial surface
// fitted over its radius neighborhood with weights exp(-r^2 / sigma^2).
// A point never moves farther than the neighborhood radius.
MlsResult mls_smooth(const PointCloud& cloud, const MlsParams& params);

// CSV report for removed points: index, mean-neighbor-distance.
void write_sor_report(const std::string& path, const SorResult& result);

}  // namespace ntcr
