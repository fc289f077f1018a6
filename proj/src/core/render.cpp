// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ntcr {

namespace {

constexpr double kRayEps = 1e-9;

// Slab test; returns [t0, t1] of ray-box overlap clipped to t >= 0.
std::optional<std::pair<double, double>> clip_to_box(const Box3& box,
                                                     const Vec3& origin,
                                                     const Vec3& dir) {
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        if (dir[axis] == 0.0) {
            if (origin[axis] < box.min[axis] || origin[axis] > box.max[axis])
                return std::nullopt;
            continue;
        }
        double lo = (box.min[axis] - origin[axis]) / dir[axis];
        double hi = (box.max[axis] - origin[axis]) / dir[axis];
        if (lo > hi) std::swap(lo, hi);
        t0 = std::max(t0, lo);
        t1 = std::min(t1, hi);
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

}  // namespace

PlaneScene::PlaneScene(const Vec3& point, const Vec3& normal, std::uint8_t label)
    : point_(point), normal_(normal.normalized()), label_(label) {}

PlaneScene::PlaneScene(const Vec3& point, const Vec3& u_axis, const Vec3& v_axis,
                       double half_u, double half_v, std::uint8_t label)
    : point_(point),
      u_axis_(u_axis.normalized()),
      v_axis_(v_axis.normalized()),
      half_u_(half_u),
      half_v_(half_v),
      bounded_(true),
      label_(label) {
    normal_ = u_axis_.cross(v_axis_).normalized();
}

std::optional<RayHit> PlaneScene::first_hit(const Vec3& origin, const Vec3& dir) const {
    const double denom = dir.dot(normal_);
    if (denom == 0.0) return std::nullopt;
    const double t = (point_ - origin).dot(normal_) / denom;
    if (t <= kRayEps) return std::nullopt;
    if (bounded_) {
        const Vec3 rel = origin + t * dir - point_;
        if (std::abs(rel.dot(u_axis_)) > half_u_ || std::abs(rel.dot(v_axis_)) > half_v_)
            return std::nullopt;
    }
    return RayHit{t, label_};
}

std::optional<RayHit> SphereScene::first_hit(const Vec3& origin, const Vec3& dir) const {
    const Vec3 oc = origin - center_;
    const double a = dir.squaredNorm();
    const double b = 2.0 * oc.dot(dir);
    const double c = oc.squaredNorm() - radius_ * radius_;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double t_near = (-b - sq) / (2.0 * a);
    const double t_far = (-b + sq) / (2.0 * a);
    if (t_near > kRayEps) return RayHit{t_near, label_};
    if (t_far > kRayEps) return RayHit{t_far, label_};
    return std::nullopt;
}

NtcrScene::NtcrScene(const NtcrSpec& spec, double march_step_mm)
    : model_(spec), bounds_(model_.world_bounds()), step_(march_step_mm) {
    if (!(step_ > 0)) fail(ErrorCode::InvalidArgument, "march step must be positive");
}

std::optional<RayHit> NtcrScene::first_hit(const Vec3& origin, const Vec3& dir) const {
    const auto clip = clip_to_box(bounds_, origin, dir);
    if (!clip) return std::nullopt;

    // March in geometric steps; dir is not necessarily unit length.
    const double dt = step_ / dir.norm();
    double t_prev = clip->first;
    bool inside_prev = model_.inside_material(origin + t_prev * dir);
    if (inside_prev) return RayHit{t_prev, kLabelTube};

    const double t_end = clip->second;
    for (double t = t_prev + dt; t_prev < t_end; t += dt) {
        t = std::min(t, t_end);
        if (model_.inside_material(origin + t * dir)) {
            // Bisect the boundary crossing in [t_prev, t].
            double lo = t_prev;
            double hi = t;
            for (int i = 0; i < 64 && hi - lo > 1e-12; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (model_.inside_material(origin + mid * dir))
                    hi = mid;
                else
                    lo = mid;
            }
            return RayHit{hi, kLabelTube};
        }
        if (t >= t_end) break;
        t_prev = t;
    }
    return std::nullopt;
}

std::optional<RayHit> SceneSet::first_hit(const Vec3& origin, const Vec3& dir) const {
    std::optional<RayHit> best;
    for (const auto& scene : scenes_) {
        const auto hit = scene->first_hit(origin, dir);
        if (hit && (!best || hit->t < best->t)) best = hit;
    }
    return best;
}

RenderResult render_depth_scene(const Scene& scene, const VirtualCamera& camera,
                                std::uint64_t seed) {
    validate_camera(camera);

    RenderResult result;
    DepthMap& map = result.map;
    map.width = camera.width;
    map.height = camera.height;
    map.intrinsics = camera.intrinsics;
    map.camera_pose = camera.world_from_camera();
    map.base_frame = kBaseFrame;
    map.depth.assign(static_cast<std::size_t>(map.width) * map.height, kInvalidDepth);
    result.labels.assign(map.depth.size(), kLabelNone);

    const Vec3 origin = camera.center();
    const Mat3 rot_wc = map.camera_pose.rotation;
    const CameraIntrinsics& k = camera.intrinsics;
    const StereoGeometry stereo{camera.stereo_baseline, camera.intrinsics.fx};
    std::atomic<std::size_t> hits{0};

    parallel_for(static_cast<std::size_t>(map.height), [&](std::size_t row) {
        const int v = static_cast<int>(row);
        std::size_t row_hits = 0;
        for (int u = 0; u < map.width; ++u) {
            // Camera-frame direction with unit z, so the ray parameter t is
            // exactly the depth along the optical axis.
            const Vec3 dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
            const Vec3 dir = rot_wc * dir_cam;
            const auto hit = scene.first_hit(origin, dir);
            if (!hit) continue;
            ++row_hits;

            double z = hit->t;
            if (camera.disparity_quantization > 0) {
                const double d = depth_to_disparity(z, stereo);
                const double dq = std::round(d / camera.disparity_quantization) *
                                  camera.disparity_quantization;
                if (dq <= 0) continue;  // quantized to infinity
                z = stereo.baseline * stereo.focal / dq;
            }
            if (camera.depth_noise_fraction > 0) {
                const std::size_t pixel = row * map.width + u;
                const double g = standard_normal(seed, /*stream=*/0, pixel);
                z *= 1.0 + camera.depth_noise_fraction * g;
                if (z <= 0) continue;
            }
            map.at(u, v) = z;
            result.labels[row * map.width + u] = hit->label;
        }
        hits.fetch_add(row_hits, std::memory_order_relaxed);
    });

    result.empty_frustum = hits.load() == 0;
    return result;
}

RenderResult render_depth(const NtcrSpec& spec, const VirtualCamera& camera,
                          std::uint64_t seed) {
    return render_depth_scene(NtcrScene(spec), camera, seed);
}

}  // namespace ntcr
