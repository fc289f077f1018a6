// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntcr_model.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace ntcr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSamplerSeed = 0x5a3c6e19u;

// Area of the circular segment {r <= R, x >= c} for a circle of radius R.
double segment_area(double radius, double c) {
    if (c >= radius) return 0.0;
    if (c <= -radius) return kPi * radius * radius;
    return radius * radius * std::acos(c / radius) -
           c * std::sqrt(radius * radius - c * c);
}

}  // namespace

void validate_spec(const NtcrSpec& spec) {
    if (!(spec.outer_diameter > 2.0 * spec.wall_thickness) || !(spec.wall_thickness > 0))
        fail(ErrorCode::InvalidArgument,
             "NTCR spec: outer_diameter must exceed twice the wall thickness");
    if (!(spec.tube_length > 0))
        fail(ErrorCode::InvalidArgument, "NTCR spec: tube_length must be positive");
    if (spec.notch_count < 0)
        fail(ErrorCode::InvalidArgument, "NTCR spec: notch_count must be >= 0");
    if (spec.notch_count > 0) {
        if (!(spec.notch_width > 0) || !(spec.notch_width < spec.notch_spacing))
            fail(ErrorCode::InvalidArgument,
                 "NTCR spec: notch_width must be in (0, notch_spacing)");
        if (!(spec.notch_depth > 0) || !(spec.notch_depth < spec.outer_diameter))
            fail(ErrorCode::InvalidArgument,
                 "NTCR spec: notch_depth must be in (0, outer_diameter)");
        const double span =
            (spec.notch_count - 1) * spec.notch_spacing + spec.notch_width;
        if (span > spec.tube_length)
            fail(ErrorCode::InvalidArgument,
                 "NTCR spec: notch pattern does not fit on the tube");
    }
    if (std::abs(spec.bend_curvature) * spec.outer_diameter >= 1.0)
        fail(ErrorCode::InvalidArgument,
             "NTCR spec: bend curvature too large for the tube diameter");
}

NtcrModel::NtcrModel(const NtcrSpec& spec) : spec_(spec) {
    validate_spec(spec);
    outer_radius_ = spec.outer_diameter / 2.0;
    inner_radius_ = outer_radius_ - spec.wall_thickness;
    cut_plane_ = outer_radius_ - spec.notch_depth;
    notch_centers_.reserve(static_cast<std::size_t>(std::max(spec.notch_count, 0)));
    for (int i = 0; i < spec.notch_count; ++i)
        notch_centers_.push_back((i - (spec.notch_count - 1) / 2.0) *
                                 spec.notch_spacing);

    const double phi = spec.notch_phase_deg * kPi / 180.0;
    axis_dir_ = Vec3(1, 0, 0);
    cut_dir_ = Vec3(0, -std::sin(phi), std::cos(phi));
    comp_dir_ = Vec3(0, std::cos(phi), std::sin(phi));
}

Vec3 NtcrModel::bend_point(double a, double alpha, double beta) const {
    const double kappa = spec_.bend_curvature;
    if (kappa == 0.0)
        return a * axis_dir_ + alpha * cut_dir_ + beta * comp_dir_;
    const double ka = kappa * a;
    const Vec3 backbone =
        (std::sin(ka) / kappa) * axis_dir_ + ((1.0 - std::cos(ka)) / kappa) * cut_dir_;
    const Vec3 n_hat = -std::sin(ka) * axis_dir_ + std::cos(ka) * cut_dir_;
    return backbone + alpha * n_hat + beta * comp_dir_;
}

Vec3 NtcrModel::bend_direction(double a, double d_axial, double d_cut,
                               double d_comp) const {
    const double ka = spec_.bend_curvature * a;
    const Vec3 t_hat = std::cos(ka) * axis_dir_ + std::sin(ka) * cut_dir_;
    const Vec3 n_hat = -std::sin(ka) * axis_dir_ + std::cos(ka) * cut_dir_;
    return d_axial * t_hat + d_cut * n_hat + d_comp * comp_dir_;
}

NtcrModel::Local NtcrModel::straighten(const Vec3& world) const {
    const double x = world.dot(axis_dir_);
    const double u = world.dot(cut_dir_);
    const double beta = world.dot(comp_dir_);
    const double kappa = spec_.bend_curvature;
    if (kappa == 0.0) return Local{x, u, beta};
    const double rho = 1.0 / kappa;
    const double sgn = kappa > 0 ? 1.0 : -1.0;
    const double a = std::atan2(sgn * x, sgn * (rho - u)) / kappa;
    const double alpha = rho - sgn * std::hypot(x, rho - u);
    return Local{a, alpha, beta};
}

bool NtcrModel::in_notch_void(double a, double alpha) const {
    if (notch_centers_.empty() || alpha <= cut_plane_) return false;
    // Windows never overlap (width < spacing), so only the nearest center
    // can contain a.
    const double rel = a / spec_.notch_spacing + (spec_.notch_count - 1) / 2.0;
    const long idx = std::lround(rel);
    if (idx < 0 || idx >= static_cast<long>(notch_centers_.size())) return false;
    return std::abs(a - notch_centers_[static_cast<std::size_t>(idx)]) <
           spec_.notch_width / 2.0;
}

bool NtcrModel::inside_material(const Vec3& world) const {
    const Local l = straighten(world);
    if (std::abs(l.a) > spec_.tube_length / 2.0) return false;
    const double r2 = l.alpha * l.alpha + l.beta * l.beta;
    if (r2 > outer_radius_ * outer_radius_ || r2 < inner_radius_ * inner_radius_)
        return false;
    return !in_notch_void(l.a, l.alpha);
}

double NtcrModel::sampled_surface_area() const {
    const double ro = outer_radius_;
    const double ri = inner_radius_;
    const double c = cut_plane_;
    const double theta_c = c >= ro   ? 0.0
                           : c <= -ro ? kPi
                                      : std::acos(c / ro);
    double area = 2.0 * kPi * ro * spec_.tube_length;
    if (spec_.notch_count > 0) {
        // Removed outer-cylinder band per notch.
        area -= spec_.notch_count * spec_.notch_width * 2.0 * theta_c * ro;
        // Two annulus-segment end faces per notch.
        area += spec_.notch_count * 2.0 * (segment_area(ro, c) - segment_area(ri, c));
        // Cut-bottom strip(s).
        const double v_out = std::sqrt(std::max(ro * ro - c * c, 0.0));
        const double v_in = std::sqrt(std::max(ri * ri - c * c, 0.0));
        area += spec_.notch_count * spec_.notch_width * 2.0 * (v_out - v_in);
    }
    return area;
}

Box3 NtcrModel::world_bounds() const {
    Box3 box;
    const int steps = 512;
    for (int i = 0; i <= steps; ++i) {
        const double a = (-0.5 + static_cast<double>(i) / steps) * spec_.tube_length;
        const Vec3 c = bend_point(a, 0, 0);
        box.expand(c - Vec3::Constant(outer_radius_));
        box.expand(c + Vec3::Constant(outer_radius_));
    }
    return box;
}

PointCloud sample_ntcr_surface(const NtcrSpec& spec, double density_per_mm2) {
    if (!(density_per_mm2 > 0))
        fail(ErrorCode::InvalidArgument, "sampling density must be positive");
    const NtcrModel model(spec);

    const double ro = model.outer_radius();
    const double ri = model.inner_radius();
    const double c = model.cut_plane();
    const double half_len = spec.tube_length / 2.0;
    const double half_w = spec.notch_width / 2.0;
    const double theta_c = c >= ro   ? 0.0
                           : c <= -ro ? kPi
                                      : std::acos(c / ro);

    const double cyl_area = 2.0 * kPi * ro * spec.tube_length -
                            spec.notch_count * spec.notch_width * 2.0 * theta_c * ro;
    const double end_face_area = segment_area(ro, c) - segment_area(ri, c);
    const double v_out = std::sqrt(std::max(ro * ro - c * c, 0.0));
    const double v_in = std::sqrt(std::max(ri * ri - c * c, 0.0));
    const double strip_len = 2.0 * (v_out - v_in);  // one or two strips
    const double strip_area = spec.notch_width * strip_len;

    const auto count_for = [&](double area) {
        return static_cast<std::size_t>(std::llround(density_per_mm2 * area));
    };
    std::size_t total = count_for(cyl_area);
    if (spec.notch_count > 0)
        total += spec.notch_count * (2 * count_for(end_face_area) + count_for(strip_area));
    if (total < 100)
        fail(ErrorCode::InvalidArgument,
             "sampling density too low: would produce " + std::to_string(total) +
                 " points (< 100); the reference would be unusable");

    PointCloud cloud;
    cloud.frame = kReferenceFrame;
    cloud.points.reserve(total);
    cloud.normals.reserve(total);
    SequentialRng rng(kSamplerSeed);

    const auto emit = [&](double a, double alpha, double beta, double n_ax,
                          double n_cut, double n_comp) {
        cloud.points.push_back(model.bend_point(a, alpha, beta));
        cloud.normals.push_back(model.bend_direction(a, n_ax, n_cut, n_comp));
    };

    // Kept part of the outer cylinder.
    for (std::size_t accepted = count_for(cyl_area); accepted > 0;) {
        const double a = rng.uniform(-half_len, half_len);
        const double psi = rng.uniform(0.0, 2.0 * kPi);
        const double alpha = ro * std::cos(psi);
        if (model.in_notch_void(a, alpha)) continue;
        emit(a, alpha, ro * std::sin(psi), 0.0, std::cos(psi), std::sin(psi));
        --accepted;
    }

    for (const double center : model.notch_centers()) {
        // Axial end faces: annulus segments exposed by the cut.
        for (const double side : {-1.0, 1.0}) {
            const double a = center + side * half_w;
            // Outward normal points into the void.
            const double n_ax = -side;
            for (std::size_t accepted = count_for(end_face_area); accepted > 0;) {
                const double r = std::sqrt(rng.uniform(ri * ri, ro * ro));
                const double psi = rng.uniform(0.0, 2.0 * kPi);
                const double alpha = r * std::cos(psi);
                if (alpha < c) continue;
                emit(a, alpha, r * std::sin(psi), n_ax, 0.0, 0.0);
                --accepted;
            }
        }
        // Cut-bottom strip(s) in the plane alpha = c.
        for (std::size_t accepted = count_for(strip_area); accepted > 0; --accepted) {
            const double a = rng.uniform(center - half_w, center + half_w);
            double beta = rng.uniform(v_in, v_out);
            if (rng.uniform() < 0.5) beta = -beta;
            emit(a, c, beta, 0.0, 1.0, 0.0);
        }
    }

    return cloud;
}

}  // namespace ntcr
