// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "error.hpp"

namespace ntcr {

namespace {

// Squared-distance candidate ordered by (d2, index); the same expression the
// brute-force oracle uses, so results match bit for bit.
struct Candidate {
    double d2;
    std::uint32_t index;

    bool better_than(const Candidate& o) const {
        return d2 < o.d2 || (d2 == o.d2 && index < o.index);
    }
};

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty())
        fail(ErrorCode::InvalidArgument, "cannot build KD-tree from an empty cloud");
    std::vector<std::uint32_t> perm(points_.size());
    for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
    nodes_.reserve(points_.size());
    root_ = build(perm, 0, perm.size());
}

std::int32_t KdTree::build(std::vector<std::uint32_t>& perm, std::size_t begin,
                           std::size_t end) {
    if (begin >= end) return -1;

    Vec3 lo = points_[perm[begin]];
    Vec3 hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[perm[i]]);
        hi = hi.cwiseMax(points_[perm[i]]);
    }
    const Vec3 extent = hi - lo;
    std::uint8_t axis = 0;
    if (extent[1] > extent[axis]) axis = 1;
    if (extent[2] > extent[axis]) axis = 2;

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(perm.begin() + begin, perm.begin() + mid, perm.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = points_[a][axis];
                         const double cb = points_[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });

    const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{perm[mid], -1, -1, axis});
    const std::int32_t left = build(perm, begin, mid);
    const std::int32_t right = build(perm, mid + 1, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

Neighbor KdTree::nearest(const Vec3& q) const {
    Candidate best{std::numeric_limits<double>::infinity(), 0};

    // Iterative traversal with an explicit stack of (node, split-distance^2).
    struct Visit {
        std::int32_t node;
        double bound_d2;
    };
    std::vector<Visit> stack;
    stack.push_back({root_, 0.0});
    while (!stack.empty()) {
        const Visit v = stack.back();
        stack.pop_back();
        if (v.node < 0) continue;
        // Equal bound must still be visited: a far-side point at the same
        // distance can win the tie with a lower index.
        if (v.bound_d2 > best.d2) continue;

        const Node& n = nodes_[v.node];
        const Candidate cand{(points_[n.point] - q).squaredNorm(), n.point};
        if (cand.better_than(best)) best = cand;

        const double delta = q[n.axis] - points_[n.point][n.axis];
        const std::int32_t near_child = delta <= 0 ? n.left : n.right;
        const std::int32_t far_child = delta <= 0 ? n.right : n.left;
        stack.push_back({far_child, delta * delta});
        stack.push_back({near_child, 0.0});
    }
    return Neighbor{best.index, std::sqrt(best.d2)};
}

std::vector<Neighbor> KdTree::k_nearest(const Vec3& q, std::size_t k) const {
    if (k < 1 || k > size())
        fail(ErrorCode::InvalidArgument,
             "k_nearest: k must be in [1, cloud size], got " + std::to_string(k));

    // Max-heap keeping the k best candidates; top is the current worst.
    const auto worse = [](const Candidate& a, const Candidate& b) {
        return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
    };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse);

    struct Visit {
        std::int32_t node;
        double bound_d2;
    };
    std::vector<Visit> stack;
    stack.push_back({root_, 0.0});
    while (!stack.empty()) {
        const Visit v = stack.back();
        stack.pop_back();
        if (v.node < 0) continue;
        if (heap.size() == k && v.bound_d2 > heap.top().d2) continue;

        const Node& n = nodes_[v.node];
        const Candidate cand{(points_[n.point] - q).squaredNorm(), n.point};
        if (heap.size() < k) {
            heap.push(cand);
        } else if (cand.better_than(heap.top())) {
            heap.pop();
            heap.push(cand);
        }

        const double delta = q[n.axis] - points_[n.point][n.axis];
        const std::int32_t near_child = delta <= 0 ? n.left : n.right;
        const std::int32_t far_child = delta <= 0 ? n.right : n.left;
        stack.push_back({far_child, delta * delta});
        stack.push_back({near_child, 0.0});
    }

    std::vector<Neighbor> out(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        out[i] = Neighbor{heap.top().index, std::sqrt(heap.top().d2)};
        heap.pop();
    }
    return out;
}

std::vector<Neighbor> KdTree::radius_search(const Vec3& q, double r) const {
    if (r < 0)
        fail(ErrorCode::InvalidArgument, "radius_search: radius must be >= 0");
    const double r2 = r * r;
    std::vector<Candidate> found;

    struct Visit {
        std::int32_t node;
        double bound_d2;
    };
    std::vector<Visit> stack;
    stack.push_back({root_, 0.0});
    while (!stack.empty()) {
        const Visit v = stack.back();
        stack.pop_back();
        if (v.node < 0) continue;
        if (v.bound_d2 > r2) continue;

        const Node& n = nodes_[v.node];
        const double d2 = (points_[n.point] - q).squaredNorm();
        if (d2 <= r2) found.push_back(Candidate{d2, n.point});

        const double delta = q[n.axis] - points_[n.point][n.axis];
        const std::int32_t near_child = delta <= 0 ? n.left : n.right;
        const std::int32_t far_child = delta <= 0 ? n.right : n.left;
        stack.push_back({far_child, delta * delta});
        stack.push_back({near_child, 0.0});
    }

    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return a.better_than(b);
    });
    std::vector<Neighbor> out(found.size());
    for (std::size_t i = 0; i < found.size(); ++i)
        out[i] = Neighbor{found[i].index, std::sqrt(found[i].d2)};
    return out;
}

int KdTree::depth_of(std::int32_t node) const {
    if (node < 0) return 0;
    return 1 + std::max(depth_of(nodes_[node].left), depth_of(nodes_[node].right));
}

int KdTree::max_depth() const { return depth_of(root_); }

}  // namespace ntcr
