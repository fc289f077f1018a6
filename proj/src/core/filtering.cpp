// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "filtering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Dense>

#include "error.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"

namespace ntcr {

namespace {

PointCloud select_points(const PointCloud& cloud, const std::vector<std::size_t>& keep) {
    PointCloud out;
    out.frame = cloud.frame;
    out.points.reserve(keep.size());
    for (const std::size_t i : keep) out.points.push_back(cloud.points[i]);
    if (cloud.has_colors()) {
        out.colors.reserve(keep.size());
        for (const std::size_t i : keep) out.colors.push_back(cloud.colors[i]);
    }
    if (cloud.has_normals()) {
        out.normals.reserve(keep.size());
        for (const std::size_t i : keep) out.normals.push_back(cloud.normals[i]);
    }
    return out;
}

}  // namespace

SorResult sor_filter(const PointCloud& cloud, const SorParams& params) {
    if (params.k < 1)
        fail(ErrorCode::InvalidArgument, "SOR: k must be >= 1");
    if (cloud.size() <= static_cast<std::size_t>(params.k))
        fail(ErrorCode::InvalidArgument,
             "SOR: cloud size (" + std::to_string(cloud.size()) +
                 ") must exceed k (" + std::to_string(params.k) + ")");
    if (params.alpha < 0)
        fail(ErrorCode::InvalidArgument, "SOR: alpha must be >= 0");

    const KdTree tree(cloud);
    const std::size_t n = cloud.size();
    const std::size_t k = static_cast<std::size_t>(params.k);

    std::vector<double> mean_dist(n);
    parallel_for(n, [&](std::size_t i) {
        // Query k+1 and drop the point itself; with duplicates the self entry
        // may be displaced by equally-near twins, which is equivalent.
        const auto nn = tree.k_nearest(cloud.points[i], std::min(k + 1, n));
        double sum = 0.0;
        std::size_t used = 0;
        for (const Neighbor& nb : nn) {
            if (nb.index == i && used < k) continue;
            if (used == k) break;
            sum += nb.distance;
            ++used;
        }
        mean_dist[i] = sum / static_cast<double>(used);
    });

    double mu = 0.0;
    for (const double d : mean_dist) mu += d;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (const double d : mean_dist) var += (d - mu) * (d - mu);
    const double sigma = std::sqrt(var / static_cast<double>(n));
    const double threshold = mu + params.alpha * sigma;

    std::vector<std::size_t> keep;
    SorResult result;
    keep.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (mean_dist[i] <= threshold)
            keep.push_back(i);
        else
            result.removed_indices.push_back(i);
    }
    result.cloud = select_points(cloud, keep);
    result.mean_neighbor_distance = std::move(mean_dist);
    result.threshold = threshold;
    return result;
}

PointCloud conditional_filter(const PointCloud& cloud, const ConditionalParams& params) {
    if (params.spatial_box &&
        !(params.spatial_box->min.array() <= params.spatial_box->max.array()).all())
        fail(ErrorCode::InvalidArgument, "conditional filter: box min must be <= max");
    if (params.color_range) {
        for (int c = 0; c < 3; ++c)
            if (params.color_range->min[c] > params.color_range->max[c])
                fail(ErrorCode::InvalidArgument,
                     "conditional filter: color min must be <= max");
    }

    std::vector<std::size_t> keep;
    keep.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (params.spatial_box && !params.spatial_box->contains(cloud.points[i]))
            continue;
        if (params.color_range && cloud.has_colors()) {
            const Rgb& rgb = cloud.colors[i];
            bool ok = true;
            for (int c = 0; c < 3; ++c)
                ok = ok && rgb[c] >= params.color_range->min[c] &&
                     rgb[c] <= params.color_range->max[c];
            if (!ok) continue;
        }
        keep.push_back(i);
    }
    return select_points(cloud, keep);
}

MlsResult mls_smooth(const PointCloud& cloud, const MlsParams& params) {
    if (!(params.radius > 0))
        fail(ErrorCode::InvalidArgument, "MLS: radius must be > 0");
    if (!(params.weight_sigma > 0))
        fail(ErrorCode::InvalidArgument, "MLS: weight_sigma must be > 0");
    if (params.polynomial_order != 1 && params.polynomial_order != 2)
        fail(ErrorCode::InvalidArgument, "MLS: polynomial_order must be 1 or 2");

    MlsResult result;
    result.cloud = cloud;
    if (cloud.empty()) return result;

    const KdTree tree(cloud);
    const int n_terms = params.polynomial_order == 1 ? 3 : 6;
    const double inv_sigma2 = 1.0 / (params.weight_sigma * params.weight_sigma);
    std::vector<std::uint8_t> passed(cloud.size(), 0);

    parallel_for(cloud.size(), [&](std::size_t i) {
        const Vec3& p = cloud.points[i];
        const auto nbrs = tree.radius_search(p, params.radius);
        if (nbrs.size() < static_cast<std::size_t>(n_terms)) {
            passed[i] = 1;
            return;
        }

        // Weighted PCA frame of the neighborhood.
        double wsum = 0.0;
        Vec3 centroid = Vec3::Zero();
        std::vector<double> weights(nbrs.size());
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            const double w =
                std::exp(-nbrs[j].distance * nbrs[j].distance * inv_sigma2);
            weights[j] = w;
            wsum += w;
            centroid += w * cloud.points[nbrs[j].index];
        }
        centroid /= wsum;

        Mat3 cov = Mat3::Zero();
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            const Vec3 d = cloud.points[nbrs[j].index] - centroid;
            cov += weights[j] * (d * d.transpose());
        }
        const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        // Ascending eigenvalues: [0] is the normal direction.
        if (!(eig.eigenvalues()[1] > 1e-12 * std::max(eig.eigenvalues()[2], 1e-300))) {
            passed[i] = 1;  // degenerate (collinear) neighborhood
            return;
        }
        const Vec3 normal = eig.eigenvectors().col(0);
        const Vec3 e1 = eig.eigenvectors().col(2);
        const Vec3 e2 = eig.eigenvectors().col(1);

        // Weighted polynomial fit height(xi, eta) over the tangent frame.
        Eigen::MatrixXd design(nbrs.size(), n_terms);
        Eigen::VectorXd rhs(nbrs.size());
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            const Vec3 d = cloud.points[nbrs[j].index] - centroid;
            const double xi = d.dot(e1);
            const double eta = d.dot(e2);
            const double sw = std::sqrt(weights[j]);
            design(j, 0) = sw;
            design(j, 1) = sw * xi;
            design(j, 2) = sw * eta;
            if (n_terms == 6) {
                design(j, 3) = sw * xi * xi;
                design(j, 4) = sw * xi * eta;
                design(j, 5) = sw * eta * eta;
            }
            rhs[j] = sw * d.dot(normal);
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < n_terms) {
            passed[i] = 1;
            return;
        }
        const Eigen::VectorXd coeff = qr.solve(rhs);

        const Vec3 dp = p - centroid;
        const double xi = dp.dot(e1);
        const double eta = dp.dot(e2);
        double height = coeff[0] + coeff[1] * xi + coeff[2] * eta;
        if (n_terms == 6)
            height += coeff[3] * xi * xi + coeff[4] * xi * eta + coeff[5] * eta * eta;

        const Vec3 projected = centroid + xi * e1 + eta * e2 + height * normal;
        if ((projected - p).norm() > params.radius) {
            passed[i] = 1;  // reject runaway fits
            return;
        }
        result.cloud.points[i] = projected;
    });

    for (const std::uint8_t f : passed) result.passed_through += f;
    return result;
}

void write_sor_report(const std::string& path, const SorResult& result) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    out << "index,mean_neighbor_distance\n";
    char buf[64];
    for (const std::size_t i : result.removed_indices) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i,
                      result.mean_neighbor_distance[i]);
        out << buf;
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace ntcr
