// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Rigid alignment of captured clouds to the reference geometry: closed-form
// least-squares rigid motion from point correspondences, and iterative
// closest point with KD-tree correspondence search and distance-based pair
// rejection.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "ntcr_model.hpp"

namespace ntcr {

struct IcpParams {
    int max_iterations = 50;
    double convergence_eps = 1e-4;              // mm, change in RMS residual
    double max_correspondence_distance = 2.0;   // mm
    RigidTransform initial_guess;
    // Areal density used when sampling the reference from an NtcrSpec.
    double reference_density = 200.0;           // points/mm^2
};

struct IcpResult {
    RigidTransform transform;           // maps the original target into the reference frame
    double rms_residual = 0.0;          // mm, final accepted iteration
    int iterations_used = 0;
    std::vector<double> residual_trace; // per accepted iteration, non-increasing
    bool converged = false;
};

// Least-squares rigid motion T minimizing sum |dst_i - T(src_i)|^2 via the
// cross-covariance SVD, with reflection correction so det(R) = +1. Throws
// when fewer than 3 pairs are given or the covariance is rank-deficient
// (near-collinear points); the error names the degenerate axis.
RigidTransform solve_rigid_transform(const std::vector<Vec3>& src,
                                     const std::vector<Vec3>& dst);

// Point-to-point ICP of target onto reference. Per iteration: nearest
// reference neighbor for every transformed target point, pairs beyond
// max_correspondence_distance rejected, closed-form solve, transform update.
// Iterations that would raise the RMS are rejected and stop the loop, so the
// recorded trace is non-increasing. converged reports whether the eps
// criterion (|delta RMS| < convergence_eps, or RMS < convergence_eps on the
// first iteration) was met.
IcpResult icp_align(const PointCloud& target, const PointCloud& reference,
                    const IcpParams& params);

// Samples the reference cloud from the spec, aligns the capture to it, and
// returns the capture transformed into the reference frame plus diagnostics.
std::pair<PointCloud, IcpResult> relocate_to_reference(const PointCloud& capture,
                                                       const NtcrSpec& spec,
                                                       const IcpParams& params);

// Plain-text report: header plus per-iteration RMS trace as CSV.
void write_icp_report(const std::string& path, const IcpResult& result);

}  // namespace ntcr
