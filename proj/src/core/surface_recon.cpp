// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "surface_recon.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>

#include "error.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"

namespace ntcr {

NormalEstimationResult estimate_normals(const PointCloud& cloud, int k,
                                        const std::vector<Vec3>& viewpoint_hints) {
    if (k < 3) fail(ErrorCode::InvalidArgument, "estimate_normals: k must be >= 3");
    if (cloud.size() <= static_cast<std::size_t>(k))
        fail(ErrorCode::InvalidArgument,
             "estimate_normals: cloud size must exceed k");
    if (viewpoint_hints.empty())
        fail(ErrorCode::InvalidArgument,
             "estimate_normals: at least one viewpoint hint is required");

    const KdTree tree(cloud);
    const std::size_t n = cloud.size();
    std::vector<Vec3> normals(n);
    std::vector<std::uint8_t> valid(n, 0);

    parallel_for(n, [&](std::size_t i) {
        const Vec3& p = cloud.points[i];
        const auto nn =
            tree.k_nearest(p, static_cast<std::size_t>(k) + 1);  // includes self

        Vec3 centroid = Vec3::Zero();
        for (const Neighbor& nb : nn) centroid += cloud.points[nb.index];
        centroid /= static_cast<double>(nn.size());
        Mat3 cov = Mat3::Zero();
        for (const Neighbor& nb : nn) {
            const Vec3 d = cloud.points[nb.index] - centroid;
            cov += d * d.transpose();
        }
        const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        // Collinear neighborhood: the two smallest eigenvalues collapse and
        // the normal direction is unconstrained.
        if (!(eig.eigenvalues()[1] > 1e-9 * std::max(eig.eigenvalues()[2], 1e-300)))
            return;

        Vec3 normal = eig.eigenvectors().col(0).normalized();
        double best_d2 = std::numeric_limits<double>::infinity();
        const Vec3* best_hint = nullptr;
        for (const Vec3& hint : viewpoint_hints) {
            const double d2 = (hint - p).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best_hint = &hint;
            }
        }
        if (normal.dot(*best_hint - p) < 0) normal = -normal;
        normals[i] = normal;
        valid[i] = 1;
    });

    NormalEstimationResult result;
    result.cloud.frame = cloud.frame;
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) {
            ++result.dropped;
            continue;
        }
        result.cloud.points.push_back(cloud.points[i]);
        result.cloud.normals.push_back(normals[i]);
        if (cloud.has_colors()) result.cloud.colors.push_back(cloud.colors[i]);
    }
    return result;
}

double ScalarGrid::sample(const Vec3& p) const {
    const Vec3 g = (p - origin) / voxel_size;
    const auto clamp_base = [](double v, int n) {
        const int b = static_cast<int>(std::floor(v));
        return std::clamp(b, 0, n - 2);
    };
    const int i = clamp_base(g.x(), nx);
    const int j = clamp_base(g.y(), ny);
    const int k = clamp_base(g.z(), nz);
    const double fx = std::clamp(g.x() - i, 0.0, 1.0);
    const double fy = std::clamp(g.y() - j, 0.0, 1.0);
    const double fz = std::clamp(g.z() - k, 0.0, 1.0);
    double acc = 0.0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) *
                                 (dz ? fz : 1 - fz);
                acc += w * at(i + dx, j + dy, k + dz);
            }
    return acc;
}

VectorGrid splat_normals(const PointCloud& cloud, const Vec3& origin,
                         double voxel_size, int nx, int ny, int nz) {
    VectorGrid v;
    v.origin = origin;
    v.voxel_size = voxel_size;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    v.x.assign(v.node_count(), 0.0);
    v.y.assign(v.node_count(), 0.0);
    v.z.assign(v.node_count(), 0.0);

    // Face lattices per axis: faces along axis d sit at half-offsets in d and
    // node positions in the other two axes.
    for (std::size_t pi = 0; pi < cloud.size(); ++pi) {
        const Vec3 g = (cloud.points[pi] - origin) / voxel_size;
        const Vec3& n = cloud.normals[pi];
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 fc = g;
            fc[axis] -= 0.5;
            const int face_counts[3] = {axis == 0 ? nx - 1 : nx,
                                        axis == 1 ? ny - 1 : ny,
                                        axis == 2 ? nz - 1 : nz};
            int base[3];
            double frac[3];
            for (int d = 0; d < 3; ++d) {
                const int b = static_cast<int>(std::floor(fc[d]));
                base[d] = std::clamp(b, 0, face_counts[d] - 2);
                frac[d] = std::clamp(fc[d] - base[d], 0.0, 1.0);
            }
            std::vector<double>& arr = axis == 0 ? v.x : axis == 1 ? v.y : v.z;
            for (int dz = 0; dz < 2; ++dz)
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const double w = (dx ? frac[0] : 1 - frac[0]) *
                                         (dy ? frac[1] : 1 - frac[1]) *
                                         (dz ? frac[2] : 1 - frac[2]);
                        arr[v.index(base[0] + dx, base[1] + dy, base[2] + dz)] +=
                            w * n[axis];
                    }
        }
    }
    return v;
}

namespace {

// A*chi where A = G^T G, the 7-point Neumann Laplacian of the staggered
// gradient. Parallel over z-slabs; each slab writes only its own slice.
void apply_operator(const ScalarGrid& g, const std::vector<double>& in,
                    std::vector<double>& out) {
    const double inv_h2 = 1.0 / (g.voxel_size * g.voxel_size);
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t kz) {
        const int k = static_cast<int>(kz);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.index(i, j, k);
                double acc = 0.0;
                if (i > 0) acc += in[c] - in[c - 1];
                if (i + 1 < nx) acc += in[c] - in[c + 1];
                if (j > 0) acc += in[c] - in[c - nx];
                if (j + 1 < ny) acc += in[c] - in[c + nx];
                const std::size_t plane = static_cast<std::size_t>(nx) * ny;
                if (k > 0) acc += in[c] - in[c - plane];
                if (k + 1 < nz) acc += in[c] - in[c + plane];
                out[c] = acc * inv_h2;
            }
        }
    });
}

// b = G^T V (the negative discrete divergence scaled by 1/h).
std::vector<double> divergence_rhs(const VectorGrid& v) {
    const double inv_h = 1.0 / v.voxel_size;
    const int nx = v.nx, ny = v.ny, nz = v.nz;
    std::vector<double> b(v.node_count(), 0.0);
    const std::size_t plane = static_cast<std::size_t>(nx) * ny;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = v.index(i, j, k);
                double acc = 0.0;
                if (i > 0) acc += v.x[c - 1];
                if (i + 1 < nx) acc -= v.x[c];
                if (j > 0) acc += v.y[c - nx];
                if (j + 1 < ny) acc -= v.y[c];
                if (k > 0) acc += v.z[c - plane];
                if (k + 1 < nz) acc -= v.z[c];
                b[c] = acc * inv_h;
            }
    return b;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void remove_mean(std::vector<double>& a) {
    double mean = 0.0;
    for (const double v : a) mean += v;
    mean /= static_cast<double>(a.size());
    for (double& v : a) v -= mean;
}

// Discrete energy sum over faces of (grad(chi) - V)^2 * h^3.
double discrete_energy(const ScalarGrid& chi, const VectorGrid& v) {
    const double inv_h = 1.0 / chi.voxel_size;
    const double cell = chi.voxel_size * chi.voxel_size * chi.voxel_size;
    double acc = 0.0;
    const std::size_t plane = static_cast<std::size_t>(chi.nx) * chi.ny;
    for (int k = 0; k < chi.nz; ++k)
        for (int j = 0; j < chi.ny; ++j)
            for (int i = 0; i < chi.nx; ++i) {
                const std::size_t c = chi.index(i, j, k);
                if (i + 1 < chi.nx) {
                    const double d = (chi.values[c + 1] - chi.values[c]) * inv_h - v.x[c];
                    acc += d * d;
                }
                if (j + 1 < chi.ny) {
                    const double d =
                        (chi.values[c + chi.nx] - chi.values[c]) * inv_h - v.y[c];
                    acc += d * d;
                }
                if (k + 1 < chi.nz) {
                    const double d =
                        (chi.values[c + plane] - chi.values[c]) * inv_h - v.z[c];
                    acc += d * d;
                }
            }
    return acc * cell;
}

}  // namespace

PoissonSolveInfo solve_poisson_grid(const VectorGrid& v, ScalarGrid& chi,
                                    double relative_tolerance, int max_iterations) {
    chi.origin = v.origin;
    chi.voxel_size = v.voxel_size;
    chi.nx = v.nx;
    chi.ny = v.ny;
    chi.nz = v.nz;
    chi.values.assign(chi.node_count(), 0.0);

    std::vector<double> b = divergence_rhs(v);
    remove_mean(b);  // keep the singular system exactly compatible

    PoissonSolveInfo info;
    info.energy_initial = discrete_energy(chi, v);

    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) {
        info.energy_final = info.energy_initial;
        return info;
    }

    std::vector<double>& x = chi.values;
    std::vector<double> r = b;
    std::vector<double> p = b;
    std::vector<double> ap(b.size());
    double rr = dot(r, r);

    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        if (std::sqrt(rr) <= relative_tolerance * b_norm) break;
        apply_operator(chi, p, ap);
        const double p_ap = dot(p, ap);
        if (!(p_ap > 0)) break;  // numerical breakdown on the singular system
        const double alpha = rr / p_ap;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        // Periodically re-project the constant nullspace drift.
        if ((iter + 1) % 64 == 0) {
            remove_mean(x);
            remove_mean(r);
        }
    }

    remove_mean(x);  // gauge: zero-mean chi
    info.iterations = iter;
    info.relative_residual = std::sqrt(rr) / b_norm;
    info.energy_final = discrete_energy(chi, v);
    return info;
}

namespace {

// Cube corners: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z.
// Cube edges as (cornerA, cornerB); A holds the lower coordinate.
constexpr int kEdgeCorner[12][2] = {
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x edges
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y edges
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z edges
};
constexpr int kEdgeAxis[12] = {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2};

// Faces with corners in cyclic order and the edge between consecutive
// corners (edge f.edge[k] joins f.corner[k] and f.corner[(k+1)%4]).
struct FaceDef {
    int corner[4];
    int edge[4];
};
constexpr FaceDef kFaces[6] = {
    {{0, 1, 3, 2}, {0, 5, 1, 4}},    // z-
    {{4, 5, 7, 6}, {2, 7, 3, 6}},    // z+
    {{0, 1, 5, 4}, {0, 9, 2, 8}},    // y-
    {{2, 3, 7, 6}, {1, 11, 3, 10}},  // y+
    {{0, 2, 6, 4}, {4, 10, 6, 8}},   // x-
    {{1, 3, 5, 7}, {5, 11, 7, 9}},   // x+
};

struct CellExtractor {
    const ScalarGrid& grid;
    double iso;
    TriangleMesh& mesh;
    std::unordered_map<std::uint64_t, std::uint32_t>& vertex_of_edge;

    // Per-cell scratch.
    double value[8];
    std::uint32_t vert[12];
    int links[12][2];
    int link_count[12];

    std::uint64_t edge_key(int i, int j, int k, int edge) const {
        const int c = kEdgeCorner[edge][0];
        const std::uint64_t node =
            grid.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
        return node * 3 + static_cast<std::uint64_t>(kEdgeAxis[edge]);
    }

    std::uint32_t vertex_for_edge(int i, int j, int k, int edge) {
        const std::uint64_t key = edge_key(i, j, k, edge);
        const auto it = vertex_of_edge.find(key);
        if (it != vertex_of_edge.end()) return it->second;

        const int a = kEdgeCorner[edge][0];
        const int b = kEdgeCorner[edge][1];
        double t = (iso - value[a]) / (value[b] - value[a]);
        t = std::clamp(t, 1e-6, 1.0 - 1e-6);
        const Vec3 pa = grid.node_pos(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
        Vec3 pos = pa;
        pos[kEdgeAxis[edge]] += t * grid.voxel_size;

        const std::uint32_t idx = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(pos);
        vertex_of_edge.emplace(key, idx);
        return idx;
    }

    void link(int e1, int e2) {
        links[e1][link_count[e1]++] = e2;
        links[e2][link_count[e2]++] = e1;
    }

    void process(int i, int j, int k) {
        int inside_mask = 0;
        for (int c = 0; c < 8; ++c) {
            value[c] = grid.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
            if (value[c] < iso) inside_mask |= 1 << c;
        }
        if (inside_mask == 0 || inside_mask == 0xff) return;

        bool crossing[12];
        for (int e = 0; e < 12; ++e) {
            const bool a = inside_mask & (1 << kEdgeCorner[e][0]);
            const bool b = inside_mask & (1 << kEdgeCorner[e][1]);
            crossing[e] = a != b;
            link_count[e] = 0;
        }

        // Pair crossing edges on every face of the cube.
        for (const FaceDef& f : kFaces) {
            int cross_idx[4];
            int n_cross = 0;
            for (int e = 0; e < 4; ++e)
                if (crossing[f.edge[e]]) cross_idx[n_cross++] = e;
            if (n_cross == 0) continue;
            if (n_cross == 2) {
                link(f.edge[cross_idx[0]], f.edge[cross_idx[1]]);
                continue;
            }
            // Four crossings: corners alternate inside/outside. Resolve with
            // the bilinear saddle value (asymptotic decider); both cells
            // sharing the face see the same values, so pairing is consistent.
            const double v0 = value[f.corner[0]] - iso;
            const double v1 = value[f.corner[1]] - iso;
            const double v2 = value[f.corner[2]] - iso;
            const double v3 = value[f.corner[3]] - iso;
            const double denom = v0 + v2 - v1 - v3;
            const double saddle = denom != 0.0 ? (v0 * v2 - v1 * v3) / denom : 1.0;
            const bool corner0_inside = v0 < 0;
            const bool saddle_inside = saddle < 0;
            const bool wrap_odd_corners = corner0_inside == saddle_inside;
            if (wrap_odd_corners) {
                link(f.edge[0], f.edge[1]);
                link(f.edge[2], f.edge[3]);
            } else {
                link(f.edge[3], f.edge[0]);
                link(f.edge[1], f.edge[2]);
            }
        }

        for (int e = 0; e < 12; ++e)
            if (crossing[e]) vert[e] = vertex_for_edge(i, j, k, e);

        // Trace the 2-regular link graph into closed polygons and fan them.
        bool visited[12] = {};
        for (int start = 0; start < 12; ++start) {
            if (!crossing[start] || visited[start]) continue;
            int cycle[12];
            int len = 0;
            int prev = -1;
            int cur = start;
            do {
                visited[cur] = true;
                cycle[len++] = cur;
                const int next = links[cur][0] == prev ? links[cur][1] : links[cur][0];
                prev = cur;
                cur = next;
            } while (cur != start && len < 12);
            if (len < 3) continue;

            // Orient so triangle normals point toward increasing field.
            Vec3 grad = Vec3::Zero();
            for (int c = 0; c < 8; ++c) {
                grad.x() += (c & 1) ? value[c] : -value[c];
                grad.y() += (c & 2) ? value[c] : -value[c];
                grad.z() += (c & 4) ? value[c] : -value[c];
            }
            Vec3 newell = Vec3::Zero();
            for (int m = 0; m < len; ++m) {
                const Vec3& pa = mesh.vertices[vert[cycle[m]]];
                const Vec3& pb = mesh.vertices[vert[cycle[(m + 1) % len]]];
                newell += pa.cross(pb);
            }
            const bool flip = newell.dot(grad) < 0;

            for (int m = 1; m + 1 < len; ++m) {
                std::uint32_t a = vert[cycle[0]];
                std::uint32_t b = vert[cycle[m]];
                std::uint32_t c = vert[cycle[m + 1]];
                if (flip) std::swap(b, c);
                mesh.triangles.push_back({a, b, c});
            }
        }
    }
};

}  // namespace

TriangleMesh marching_cubes(const ScalarGrid& grid, double iso) {
    if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2)
        fail(ErrorCode::InvalidArgument, "marching cubes needs at least 2 nodes per axis");
    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> vertex_of_edge;
    CellExtractor extract{grid, iso, mesh, vertex_of_edge, {}, {}, {}, {}};
    for (int k = 0; k + 1 < grid.nz; ++k)
        for (int j = 0; j + 1 < grid.ny; ++j)
            for (int i = 0; i + 1 < grid.nx; ++i) extract.process(i, j, k);
    return mesh;
}

MeshEdgeStats mesh_edge_stats(const TriangleMesh& mesh) {
    std::unordered_map<std::uint64_t, int> counts;
    counts.reserve(mesh.triangles.size() * 3);
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const std::uint32_t a = tri[e];
            const std::uint32_t b = tri[(e + 1) % 3];
            const std::uint64_t key =
                (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
            ++counts[key];
        }
    }
    MeshEdgeStats stats;
    stats.unique_edges = counts.size();
    for (const auto& [key, count] : counts) {
        if (count == 1) ++stats.boundary_edges;
        if (count > 2) ++stats.non_manifold_edges;
    }
    return stats;
}

PoissonResult poisson_reconstruct(const PointCloud& cloud, const PoissonParams& params) {
    if (!cloud.has_normals())
        fail(ErrorCode::InvalidArgument,
             "poisson_reconstruct: cloud has no normals; run estimate_normals first");
    if (cloud.empty())
        fail(ErrorCode::InvalidArgument, "poisson_reconstruct: empty cloud");
    if (!(params.voxel_size > 0))
        fail(ErrorCode::InvalidArgument, "poisson_reconstruct: voxel_size must be > 0");

    const Box3 box = bounding_box(cloud.points);
    const double h = params.voxel_size;
    const int pad = std::max(params.padding_voxels, 1);
    const Vec3 extent = box.max - box.min;
    const int nx = static_cast<int>(std::ceil(extent.x() / h)) + 1 + 2 * pad;
    const int ny = static_cast<int>(std::ceil(extent.y() / h)) + 1 + 2 * pad;
    const int nz = static_cast<int>(std::ceil(extent.z() / h)) + 1 + 2 * pad;
    const std::size_t cells = static_cast<std::size_t>(nx) * ny * nz;
    if (cells > params.max_cells)
        fail(ErrorCode::InvalidArgument,
             "poisson_reconstruct: grid of " + std::to_string(cells) +
                 " cells exceeds the budget of " + std::to_string(params.max_cells) +
                 "; increase voxel_size");
    const Vec3 origin = box.min - Vec3::Constant(pad * h);

    const VectorGrid v = splat_normals(cloud, origin, h, nx, ny, nz);

    PoissonResult result;
    ScalarGrid chi;
    result.solve =
        solve_poisson_grid(v, chi, params.cg_tolerance, params.cg_max_iterations);

    if (params.iso_policy == IsoPolicy::MeanOfSamples) {
        double acc = 0.0;
        for (const Vec3& p : cloud.points) acc += chi.sample(p);
        result.iso = acc / static_cast<double>(cloud.size());
    } else {
        result.iso = params.iso_value;
    }

    result.mesh = marching_cubes(chi, result.iso);
    const MeshEdgeStats stats = mesh_edge_stats(result.mesh);
    result.watertight = !result.mesh.triangles.empty() && stats.boundary_edges == 0 &&
                        stats.non_manifold_edges == 0;
    return result;
}

}  // namespace ntcr
