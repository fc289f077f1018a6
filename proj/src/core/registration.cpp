// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "registration.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "error.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"

namespace ntcr {

RigidTransform solve_rigid_transform(const std::vector<Vec3>& src,
                                     const std::vector<Vec3>& dst) {
    if (src.size() != dst.size())
        fail(ErrorCode::InvalidArgument, "correspondence lists differ in length");
    const std::size_t n = src.size();
    if (n < 3)
        fail(ErrorCode::InvalidArgument,
             "need at least 3 correspondences, got " + std::to_string(n));

    Vec3 src_mean = Vec3::Zero();
    Vec3 dst_mean = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        src_mean += src[i];
        dst_mean += dst[i];
    }
    src_mean /= static_cast<double>(n);
    dst_mean /= static_cast<double>(n);

    Mat3 cross_cov = Mat3::Zero();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 a = src[i] - src_mean;
        const Vec3 b = dst[i] - dst_mean;
        cross_cov += a * b.transpose();
        scale += a.squaredNorm();
    }

    const Eigen::JacobiSVD<Mat3> svd(cross_cov,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 sv = svd.singularValues();
    // Rank < 2 means the source points are (nearly) collinear: the rotation
    // about that line is unobservable.
    if (!(sv[1] > 1e-12 * std::max(sv[0], 1e-300)) || !(scale > 0)) {
        Vec3 line = svd.matrixU().col(0);
        int axis = 0;
        if (std::abs(line[1]) > std::abs(line[axis])) axis = 1;
        if (std::abs(line[2]) > std::abs(line[axis])) axis = 2;
        fail(ErrorCode::Stage,
             std::string("degenerate correspondence covariance: points nearly "
                         "collinear along the ") +
                 "xyz"[axis] + " axis");
    }

    Mat3 rotation = svd.matrixV() * svd.matrixU().transpose();
    if (rotation.determinant() < 0) {
        Mat3 v = svd.matrixV();
        v.col(2) *= -1.0;
        rotation = v * svd.matrixU().transpose();
    }
    return RigidTransform{rotation, dst_mean - rotation * src_mean};
}

IcpResult icp_align(const PointCloud& target, const PointCloud& reference,
                    const IcpParams& params) {
    if (params.max_iterations < 1)
        fail(ErrorCode::InvalidArgument, "ICP: max_iterations must be >= 1");
    if (!(params.convergence_eps > 0))
        fail(ErrorCode::InvalidArgument, "ICP: convergence_eps must be > 0");
    if (!(params.max_correspondence_distance > 0))
        fail(ErrorCode::InvalidArgument,
             "ICP: max_correspondence_distance must be > 0");
    if (target.size() < 3 || reference.size() < 3)
        fail(ErrorCode::InvalidArgument, "ICP: both clouds need at least 3 points");
    if (!is_rigid(params.initial_guess))
        fail(ErrorCode::InvalidArgument, "ICP: initial guess is not rigid");

    // The reference is static, so one balanced build serves every iteration.
    const KdTree tree(reference);

    IcpResult result;
    result.transform = params.initial_guess;

    std::vector<Vec3> current(target.size());
    std::vector<Neighbor> nn(target.size());
    for (int iter = 1; iter <= params.max_iterations; ++iter) {
        for (std::size_t i = 0; i < target.size(); ++i)
            current[i] = result.transform * target.points[i];

        parallel_for(target.size(),
                     [&](std::size_t i) { nn[i] = tree.nearest(current[i]); });

        std::vector<Vec3> src;
        std::vector<Vec3> dst;
        src.reserve(target.size());
        dst.reserve(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) {
            if (nn[i].distance > params.max_correspondence_distance) continue;
            src.push_back(current[i]);
            dst.push_back(reference.points[nn[i].index]);
        }
        if (src.size() < 3)
            fail(ErrorCode::Stage,
                 "ICP iteration " + std::to_string(iter) + ": only " +
                     std::to_string(src.size()) +
                     " correspondences within the rejection distance");

        const RigidTransform delta = solve_rigid_transform(src, dst);

        double sq_sum = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i)
            sq_sum += (dst[i] - delta * src[i]).squaredNorm();
        const double rms = std::sqrt(sq_sum / static_cast<double>(src.size()));

        if (!result.residual_trace.empty() &&
            rms > result.residual_trace.back() + 1e-12) {
            // The update would worsen the fit; keep the previous transform.
            result.converged = false;
            break;
        }

        const double prev = result.residual_trace.empty()
                                ? std::numeric_limits<double>::infinity()
                                : result.residual_trace.back();
        result.transform = delta * result.transform;
        result.residual_trace.push_back(rms);
        result.iterations_used = iter;

        const bool first_and_tiny =
            result.residual_trace.size() == 1 && rms < params.convergence_eps;
        if (first_and_tiny || std::abs(prev - rms) < params.convergence_eps) {
            result.converged = true;
            break;
        }
    }

    result.rms_residual =
        result.residual_trace.empty() ? 0.0 : result.residual_trace.back();
    return result;
}

std::pair<PointCloud, IcpResult> relocate_to_reference(const PointCloud& capture,
                                                       const NtcrSpec& spec,
                                                       const IcpParams& params) {
    if (capture.empty())
        fail(ErrorCode::InvalidArgument, "relocate: capture cloud is empty");
    const PointCloud reference = sample_ntcr_surface(spec, params.reference_density);
    IcpResult result = icp_align(capture, reference, params);
    PointCloud aligned = apply_transform(capture, result.transform, kReferenceFrame);
    return {std::move(aligned), std::move(result)};
}

void write_icp_report(const std::string& path, const IcpResult& result) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "# icp: converged=%d iterations=%d rms=%.9g\n",
                  result.converged ? 1 : 0, result.iterations_used,
                  result.rms_residual);
    out << buf << "iteration,rms_residual\n";
    for (std::size_t i = 0; i < result.residual_trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i + 1,
                      result.residual_trace[i]);
        out << buf;
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace ntcr
