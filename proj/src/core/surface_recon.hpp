// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Normal estimation and grid-based Poisson surface reconstruction.
//
// The solver discretizes the energy integral of |grad(chi) - V|^2 on a
// regular staggered grid: chi lives on nodes, V components on the faces
// between nodes. The minimizer satisfies the discrete Poisson equation
// (normal equations G^T G chi = G^T V), which bakes in zero-Neumann
// boundaries, and is solved by conjugate gradients. The isosurface is then
// extracted by marching cubes with vertices welded on shared cell edges and
// face ambiguities resolved by the bilinear saddle value, so the mesh has no
// non-manifold edges by construction.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace ntcr {

struct NormalEstimationResult {
    PointCloud cloud;          // points with valid normals only
    std::size_t dropped = 0;   // excluded for degenerate neighborhoods
};

// Per-point normal = smallest-eigenvalue eigenvector of the covariance of the
// k nearest neighbors, sign-oriented toward the nearest viewpoint hint.
// Requires cloud size > k >= 3 and at least one hint.
NormalEstimationResult estimate_normals(const PointCloud& cloud, int k,
                                        const std::vector<Vec3>& viewpoint_hints);

// Regular node-centered scalar field (the indicator chi).
struct ScalarGrid {
    Vec3 origin = Vec3::Zero();  // position of node (0,0,0)
    double voxel_size = 1.0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> values;  // x-fastest

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    double& at(int i, int j, int k) { return values[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    Vec3 node_pos(int i, int j, int k) const {
        return origin + voxel_size * Vec3(i, j, k);
    }
    std::size_t node_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    // Trilinear interpolation; p is clamped to the grid interior.
    double sample(const Vec3& p) const;
};

// Staggered vector field: component d lives on faces between nodes along
// axis d. Arrays share the node layout; entries at the top index of their
// own axis are unused and stay zero.
struct VectorGrid {
    Vec3 origin = Vec3::Zero();
    double voxel_size = 1.0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> x, y, z;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    std::size_t node_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
};

// Distributes oriented normals onto the staggered field by trilinear
// splatting of each component at its face-center offset.
VectorGrid splat_normals(const PointCloud& cloud, const Vec3& origin,
                         double voxel_size, int nx, int ny, int nz);

struct PoissonSolveInfo {
    int iterations = 0;
    double relative_residual = 0.0;
    double energy_initial = 0.0;  // discrete energy at chi = 0
    double energy_final = 0.0;    // at the returned solution
};

// Minimizes the discrete energy over chi (CG on the normal equations) and
// gauge-fixes the result to zero mean. chi adopts the grid geometry of v.
PoissonSolveInfo solve_poisson_grid(const VectorGrid& v, ScalarGrid& chi,
                                    double relative_tolerance = 1e-6,
                                    int max_iterations = 5000);

// Isosurface of a node grid at the given iso value. Vertices are welded on
// shared grid edges; every interior surface edge lands in exactly 2 triangles.
TriangleMesh marching_cubes(const ScalarGrid& grid, double iso);

struct MeshEdgeStats {
    std::size_t unique_edges = 0;
    std::size_t boundary_edges = 0;      // edges used by exactly 1 triangle
    std::size_t non_manifold_edges = 0;  // edges used by 3+ triangles
};
MeshEdgeStats mesh_edge_stats(const TriangleMesh& mesh);

enum class IsoPolicy {
    MeanOfSamples,  // mean of chi interpolated at the input points
    FixedValue,
};

struct PoissonParams {
    double voxel_size = 0.25;  // mm
    IsoPolicy iso_policy = IsoPolicy::MeanOfSamples;
    double iso_value = 0.0;    // used by FixedValue
    int padding_voxels = 1;    // boundary ring around the cloud bounds
    std::size_t max_cells = 20'000'000;
    double cg_tolerance = 1e-6;
    int cg_max_iterations = 5000;
};

struct PoissonResult {
    TriangleMesh mesh;
    bool watertight = false;
    double iso = 0.0;
    PoissonSolveInfo solve;
};

// Full reconstruction: splat -> solve -> iso selection -> marching cubes.
// Requires a cloud with normals (estimate_normals otherwise) and a grid
// within the cell budget.
PoissonResult poisson_reconstruct(const PointCloud& cloud, const PoissonParams& params);

}  // namespace ntcr
