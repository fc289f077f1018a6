// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Parametric model of a notched tubular continuum robot: a hollow tube with
// rectangular notches cut from one side, posed at constant curvature. This is
// both the synthetic ground truth and the registration reference.
//
// Reference frame convention: backbone along +x spanning
// [-tube_length/2, +tube_length/2], cut direction at notch_phase = 0 is +z,
// bending curls the tube toward the cut direction.

#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"

namespace ntcr {

inline const std::string kBaseFrame = "base";
inline const std::string kReferenceFrame = "reference";

struct NtcrSpec {
    double outer_diameter = 3.5;   // mm
    double wall_thickness = 0.3;   // mm
    double tube_length = 45.0;     // mm
    int notch_count = 16;
    double notch_width = 1.5;      // mm, axial extent of each cut
    double notch_depth = 2.8;      // mm, radial cut depth
    double notch_spacing = 2.5;    // mm, axial pitch between notch centers
    double notch_phase_deg = 0.0;  // circumferential orientation of the cuts
    double bend_curvature = 0.0;   // 1/mm, 0 = straight
};

// Throws Error(InvalidArgument) when the parameters do not describe a
// manufacturable tube (wall too thick, notches overlapping or off the tube,
// cut deeper than the diameter, ...).
void validate_spec(const NtcrSpec& spec);

// Precomputed geometry queries for one spec.
class NtcrModel {
public:
    explicit NtcrModel(const NtcrSpec& spec);

    const NtcrSpec& spec() const { return spec_; }
    double outer_radius() const { return outer_radius_; }
    double inner_radius() const { return inner_radius_; }
    // Signed offset of the cut plane along the cut direction; material with
    // local cut-coordinate above this value is removed inside a notch window.
    double cut_plane() const { return cut_plane_; }
    const std::vector<double>& notch_centers() const { return notch_centers_; }

    // Local coordinates: a = arc length along the backbone (0 at tube
    // center), alpha = offset along the cut direction, beta = the
    // complementary cross-section coordinate.
    struct Local {
        double a;
        double alpha;
        double beta;
    };

    // Constant-curvature map from local straight coordinates to the world.
    Vec3 bend_point(double a, double alpha, double beta) const;
    // Rotates a straight-frame direction (axial, cut, complement components)
    // into the world frame at backbone station a.
    Vec3 bend_direction(double a, double d_axial, double d_cut, double d_comp) const;
    // Inverse of bend_point (valid while curvature * |offset| < 1).
    Local straighten(const Vec3& world) const;

    // True when the local straight point lies strictly inside a notch void.
    bool in_notch_void(double a, double alpha) const;
    // Solid membership test in world coordinates (used by the ray caster).
    bool inside_material(const Vec3& world) const;

    // Area of the sampled surface set: kept outer cylinder + notch cut faces,
    // measured in the straight frame.
    double sampled_surface_area() const;

    // Conservative world-frame bounding box of the bent tube.
    Box3 world_bounds() const;

private:
    NtcrSpec spec_;
    double outer_radius_;
    double inner_radius_;
    double cut_plane_;
    std::vector<double> notch_centers_;
    // Cross-section basis in world coordinates for the straight pose.
    Vec3 axis_dir_;  // +x
    Vec3 cut_dir_;   // notch_phase rotation of +z about +x
    Vec3 comp_dir_;  // completes the cross-section basis
};

// Samples the notched-tube outer surface and cut faces with approximately
// uniform areal density (points/mm^2), with outward unit normals, in the
// reference frame. Deterministic for a given (spec, density). Throws when
// fewer than 100 points would result.
PointCloud sample_ntcr_surface(const NtcrSpec& spec, double density_per_mm2);

}  // namespace ntcr
