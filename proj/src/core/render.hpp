// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic depth rendering: casts one ray per pixel into an analytic scene,
// records the hit distance along the optical axis, then corrupts it with the
// stereo sensor model (disparity quantization followed by multiplicative
// Gaussian noise). Rendering is pure given (scene, camera, seed).

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "camera.hpp"
#include "ntcr_model.hpp"
#include "projection.hpp"

namespace ntcr {

// Per-pixel ground-truth labels.
enum : std::uint8_t {
    kLabelNone = 0,
    kLabelTube = 1,
    kLabelBackdrop = 2,
};

struct RayHit {
    double t;  // parameter along the ray direction
    std::uint8_t label;
};

class Scene {
public:
    virtual ~Scene() = default;
    // First intersection at t > 0 of origin + t*dir (dir need not be unit).
    virtual std::optional<RayHit> first_hit(const Vec3& origin,
                                            const Vec3& dir) const = 0;
};

// Infinite plane, or a finite rectangle when half_extents are set.
class PlaneScene : public Scene {
public:
    PlaneScene(const Vec3& point, const Vec3& normal,
               std::uint8_t label = kLabelBackdrop);
    // Finite rectangle: u_axis/v_axis span the plane, half extents in mm.
    PlaneScene(const Vec3& point, const Vec3& u_axis, const Vec3& v_axis,
               double half_u, double half_v, std::uint8_t label = kLabelBackdrop);

    std::optional<RayHit> first_hit(const Vec3& origin, const Vec3& dir) const override;

private:
    Vec3 point_;
    Vec3 normal_;
    Vec3 u_axis_ = Vec3::Zero();
    Vec3 v_axis_ = Vec3::Zero();
    double half_u_ = 0;
    double half_v_ = 0;
    bool bounded_ = false;
    std::uint8_t label_;
};

class SphereScene : public Scene {
public:
    SphereScene(const Vec3& center, double radius, std::uint8_t label = kLabelTube)
        : center_(center), radius_(radius), label_(label) {}

    std::optional<RayHit> first_hit(const Vec3& origin, const Vec3& dir) const override;

private:
    Vec3 center_;
    double radius_;
    std::uint8_t label_;
};

// The notched tube: ray-marched membership test with bisection refinement.
class NtcrScene : public Scene {
public:
    explicit NtcrScene(const NtcrSpec& spec, double march_step_mm = 0.05);

    std::optional<RayHit> first_hit(const Vec3& origin, const Vec3& dir) const override;
    const NtcrModel& model() const { return model_; }

private:
    NtcrModel model_;
    Box3 bounds_;
    double step_;
};

// Union of scenes; nearest hit wins.
class SceneSet : public Scene {
public:
    void add(std::shared_ptr<const Scene> scene) { scenes_.push_back(std::move(scene)); }
    std::optional<RayHit> first_hit(const Vec3& origin, const Vec3& dir) const override;

private:
    std::vector<std::shared_ptr<const Scene>> scenes_;
};

struct RenderResult {
    DepthMap map;
    std::vector<std::uint8_t> labels;  // row-major, kLabelNone where invalid
    bool empty_frustum = false;        // no ray hit anything
};

// Renders the scene from the camera. The returned map carries the camera's
// true world-from-camera pose; callers modelling calibration error may
// overwrite it. Identical (scene, camera, seed) give bit-identical maps
// regardless of thread count.
RenderResult render_depth_scene(const Scene& scene, const VirtualCamera& camera,
                                std::uint64_t seed);

// Convenience wrapper for the tube alone.
RenderResult render_depth(const NtcrSpec& spec, const VirtualCamera& camera,
                          std::uint64_t seed);

}  // namespace ntcr
