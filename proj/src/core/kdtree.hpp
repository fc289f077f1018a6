// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Balanced KD-tree over 3D points with exact nearest-neighbor, k-NN and
// radius queries. Immutable after build; concurrent queries are safe.

#pragma once

#include <cstddef>
#include <vector>

#include "geometry.hpp"

namespace ntcr {

struct Neighbor {
    std::size_t index;
    double distance;  // mm
};

class KdTree {
public:
    // Balanced build: median split on the axis of maximum extent per node,
    // ties broken by lower point index. Throws on an empty input.
    explicit KdTree(std::vector<Vec3> points);
    explicit KdTree(const PointCloud& cloud) : KdTree(cloud.points) {}

    std::size_t size() const { return points_.size(); }
    const std::vector<Vec3>& points() const { return points_; }

    // Index minimizing Euclidean distance to q; ties by lower index.
    Neighbor nearest(const Vec3& q) const;

    // The k smallest distances in ascending order, ties by index.
    // Throws unless 1 <= k <= size().
    std::vector<Neighbor> k_nearest(const Vec3& q, std::size_t k) const;

    // All indices with distance <= r, ascending by distance then index.
    std::vector<Neighbor> radius_search(const Vec3& q, double r) const;

    // Longest root-to-leaf path, for balance checks.
    int max_depth() const;

private:
    struct Node {
        std::uint32_t point;  // index into points_
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint8_t axis = 0;
    };

    std::int32_t build(std::vector<std::uint32_t>& perm, std::size_t begin,
                       std::size_t end);
    int depth_of(std::int32_t node) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace ntcr
