// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "pgm_io.hpp"

namespace ntcr {

namespace {

constexpr double kNotchBin = 0.1;  // mm

int voxel_of(double coord, double origin, double size, int dims) {
    const int idx = static_cast<int>(std::floor((coord - origin) / size));
    return std::clamp(idx, 0, dims - 1);
}

// Number of lattice cells covering [0, extent] with the anchor at 0; a point
// exactly at the extent boundary falls into the last cell.
int dims_for(double extent, double size) {
    return std::max(1, static_cast<int>(std::floor(extent / size)) + 1);
}

}  // namespace

PdcReport compute_pdc(const PointCloud& cloud, double voxel_size) {
    if (cloud.empty())
        fail(ErrorCode::InvalidArgument, "compute_pdc: cloud is empty");
    if (!(voxel_size > 0))
        fail(ErrorCode::InvalidArgument, "compute_pdc: voxel_size must be > 0");

    const Box3 box = bounding_box(cloud.points);
    const Vec3 extent = box.max - box.min;
    const int nx = dims_for(extent.x(), voxel_size);
    const int ny = dims_for(extent.y(), voxel_size);
    const int nz = dims_for(extent.z(), voxel_size);
    const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
    if (total > (std::size_t{1} << 31))
        fail(ErrorCode::InvalidArgument,
             "compute_pdc: voxel grid too large; increase voxel_size");

    std::vector<std::uint32_t> counts(total, 0);
    for (const Vec3& p : cloud.points) {
        const int i = voxel_of(p.x(), box.min.x(), voxel_size, nx);
        const int j = voxel_of(p.y(), box.min.y(), voxel_size, ny);
        const int k = voxel_of(p.z(), box.min.z(), voxel_size, nz);
        ++counts[(static_cast<std::size_t>(k) * ny + j) * nx + i];
    }

    PdcReport report;
    report.voxel_size = voxel_size;
    report.total_voxel_count = total;
    report.point_count = cloud.size();
    double sum = 0.0, sum_sq = 0.0;
    for (const std::uint32_t c : counts) {
        sum += c;
        sum_sq += static_cast<double>(c) * c;
        if (c > 0) ++report.occupied_voxel_count;
    }
    report.mean_density = sum / static_cast<double>(total);
    const double var =
        sum_sq / static_cast<double>(total) - report.mean_density * report.mean_density;
    report.std_density = std::sqrt(std::max(var, 0.0));
    report.lambda = pdc_lambda(report.mean_density, report.std_density);
    report.degenerate = cloud.size() == 1;
    return report;
}

Heatmap density_heatmap(const PointCloud& cloud, int axis_u, int axis_v,
                        double cell_size) {
    if (cloud.empty())
        fail(ErrorCode::InvalidArgument, "density_heatmap: cloud is empty");
    if (axis_u < 0 || axis_u > 2 || axis_v < 0 || axis_v > 2 || axis_u == axis_v)
        fail(ErrorCode::InvalidArgument, "density_heatmap: bad axis pair");
    if (!(cell_size > 0))
        fail(ErrorCode::InvalidArgument, "density_heatmap: cell_size must be > 0");

    const Box3 box = bounding_box(cloud.points);
    Heatmap hm;
    hm.axis_u = axis_u;
    hm.axis_v = axis_v;
    hm.cell_size = cell_size;
    hm.origin_u = box.min[axis_u];
    hm.origin_v = box.min[axis_v];
    hm.nu = dims_for(box.max[axis_u] - box.min[axis_u], cell_size);
    hm.nv = dims_for(box.max[axis_v] - box.min[axis_v], cell_size);
    hm.counts.assign(static_cast<std::size_t>(hm.nu) * hm.nv, 0);
    for (const Vec3& p : cloud.points) {
        const int u = voxel_of(p[axis_u], hm.origin_u, cell_size, hm.nu);
        const int v = voxel_of(p[axis_v], hm.origin_v, cell_size, hm.nv);
        ++hm.counts[static_cast<std::size_t>(v) * hm.nu + u];
    }
    return hm;
}

void write_heatmap_csv(const std::string& path, const Heatmap& hm) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    out << "# axes=" << "xyz"[hm.axis_u] << "xyz"[hm.axis_v]
        << " cell=" << hm.cell_size << " origin=" << hm.origin_u << ","
        << hm.origin_v << "\n";
    for (int v = 0; v < hm.nv; ++v) {
        for (int u = 0; u < hm.nu; ++u) {
            if (u) out << ',';
            out << hm.at(u, v);
        }
        out << '\n';
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

void write_heatmap_pgm(const std::string& path, const Heatmap& hm) {
    std::uint64_t max_count = 0;
    for (const std::uint64_t c : hm.counts) max_count = std::max(max_count, c);
    std::vector<std::uint8_t> pixels(hm.counts.size(), 0);
    if (max_count > 0) {
        for (std::size_t i = 0; i < hm.counts.size(); ++i)
            pixels[i] = static_cast<std::uint8_t>(
                std::llround(255.0 * static_cast<double>(hm.counts[i]) /
                             static_cast<double>(max_count)));
    }
    write_pgm8(path, hm.nu, hm.nv, pixels);
}

namespace {

// Sub-bin crossing of `level` scanning outward from the run edge. Bin b is
// the first bin of the low run when dir=-1 (left edge) or the last when
// dir=+1 (right edge). Returns the axial position of the crossing.
//
// Two shoulder shapes occur: a ramp (the tube wall occupancy rising back to
// the plateau), where linear interpolation between bin centers locates the
// crossing, and a wall spike (points concentrated on a cut face, several
// times the plateau in one bin), where the spike's own bin center is the
// edge estimate.
double refine_edge(const std::vector<double>& hist, int b, int dir, double level,
                   double plateau, double axis_min) {
    const int n = static_cast<int>(hist.size());
    int lo = b;  // below level
    int hi = b + dir;
    while (hi >= 0 && hi < n && hist[hi] < level) {
        lo = hi;
        hi += dir;
    }
    if (hi < 0 || hi >= n)
        return axis_min + (dir < 0 ? 0.0 : n * kNotchBin);  // ran off the histogram
    if (hist[hi] >= 2.0 * plateau)
        return axis_min + (hi + 0.5) * kNotchBin;  // wall spike
    const double c_lo = hist[lo];
    const double c_hi = hist[hi];
    const double center_lo = axis_min + (lo + 0.5) * kNotchBin;
    const double t = c_hi > c_lo ? (level - c_lo) / (c_hi - c_lo) : 0.0;
    return center_lo + dir * t * kNotchBin;
}

}  // namespace

NotchReport measure_notches(const PointCloud& cloud, const NtcrSpec& spec) {
    if (cloud.frame != kReferenceFrame)
        fail(ErrorCode::Stage,
             "measure_notches: cloud frame is '" + cloud.frame +
                 "', expected '" + kReferenceFrame + "'; align to the reference first");
    if (cloud.empty())
        fail(ErrorCode::InvalidArgument, "measure_notches: cloud is empty");

    const NtcrModel model(spec);
    NotchReport report;
    report.standard_width = spec.notch_width;
    if (spec.notch_count == 0) {
        report.empty = true;
        return report;
    }

    // Straighten, keep the cut side, and bin axially.
    const double half_len = spec.tube_length / 2.0;
    const double side_threshold = std::max(model.cut_plane(), 0.0);
    const int bins = std::max(1, static_cast<int>(std::ceil(spec.tube_length / kNotchBin)));
    std::vector<double> hist(bins, 0.0);
    std::size_t used = 0;
    for (const Vec3& p : cloud.points) {
        const NtcrModel::Local l = model.straighten(p);
        if (std::abs(l.a) > half_len + 1.0) continue;
        if (l.alpha <= side_threshold) continue;
        const int b = std::clamp(
            static_cast<int>(std::floor((l.a + half_len) / kNotchBin)), 0, bins - 1);
        hist[b] += 1.0;
        ++used;
    }
    if (used == 0)
        fail(ErrorCode::Stage, "measure_notches: no points on the notched side");

    std::vector<double> occupied;
    for (const double c : hist)
        if (c > 0) occupied.push_back(c);
    if (occupied.empty())
        fail(ErrorCode::Stage, "measure_notches: empty occupancy histogram");
    std::sort(occupied.begin(), occupied.end());
    const double median = occupied[occupied.size() / 2];
    const double detect_level = 0.2 * median;
    const double refine_level = 0.5 * median;

    // Maximal runs of bins below the detection level.
    struct Run {
        int first, last;
    };
    std::vector<Run> runs;
    for (int b = 0; b < bins;) {
        if (hist[b] < detect_level) {
            int e = b;
            while (e + 1 < bins && hist[e + 1] < detect_level) ++e;
            runs.push_back({b, e});
            b = e + 1;
        } else {
            ++b;
        }
    }

    std::vector<double> widths;
    for (int i = 0; i < spec.notch_count; ++i) {
        const double center = model.notch_centers()[static_cast<std::size_t>(i)];
        const double w0 = center - spec.notch_width / 2.0 + half_len;  // window in hist coords
        const double w1 = center + spec.notch_width / 2.0 + half_len;

        const Run* best = nullptr;
        double best_overlap = 0.0;
        for (const Run& run : runs) {
            const double r0 = run.first * kNotchBin;
            const double r1 = (run.last + 1) * kNotchBin;
            const double overlap = std::min(r1, w1) - std::max(r0, w0);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best = &run;
            }
        }

        NotchMeasurement m;
        m.index = i;
        if (best != nullptr) {
            const double left = refine_edge(hist, best->first, -1, refine_level, -half_len);
            const double right = refine_edge(hist, best->last, +1, refine_level, -half_len);
            const double width = right - left;
            if (width > 0) {
                m.observable = true;
                m.width = width;
                widths.push_back(width);
            }
        }
        report.notches.push_back(m);
    }

    report.observable_count = widths.size();
    if (!widths.empty()) {
        double sum = 0.0;
        for (const double w : widths) sum += w;
        report.mean_width = sum / static_cast<double>(widths.size());
        std::vector<double> sorted = widths;
        std::sort(sorted.begin(), sorted.end());
        report.median_width = sorted[sorted.size() / 2];
        double var = 0.0;
        for (const double w : widths)
            var += (w - report.mean_width) * (w - report.mean_width);
        report.std_width = std::sqrt(var / static_cast<double>(widths.size()));
    }
    return report;
}

std::string pdc_report_text(const PdcReport& r) {
    std::ostringstream out;
    char buf[256];
    out << "# point density consistency (statistics over all voxels of the tight "
           "axis-aligned bounding box)\n";
    std::snprintf(buf, sizeof(buf),
                  "voxel_size_mm = %.9g\nmean_density = %.9g\nstd_density = %.9g\n"
                  "lambda = %.9g\noccupied_voxels = %zu\ntotal_voxels = %zu\n"
                  "points = %zu\ndegenerate = %d\n",
                  r.voxel_size, r.mean_density, r.std_density, r.lambda,
                  r.occupied_voxel_count, r.total_voxel_count, r.point_count,
                  r.degenerate ? 1 : 0);
    out << buf;
    return out.str();
}

void write_pdc_csv(const std::string& path, const PdcReport& r) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    char buf[256];
    out << "voxel_size,mean_density,std_density,lambda,occupied_voxels,total_voxels,points\n";
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%zu,%zu,%zu\n",
                  r.voxel_size, r.mean_density, r.std_density, r.lambda,
                  r.occupied_voxel_count, r.total_voxel_count, r.point_count);
    out << buf;
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

std::string notch_report_text(const NotchReport& r) {
    std::ostringstream out;
    char buf[128];
    if (r.empty) {
        out << "no notches in the tube specification\n";
        return out.str();
    }
    out << "# notch width measurements (standard width "
        << r.standard_width << " mm)\n";
    for (const NotchMeasurement& m : r.notches) {
        if (m.observable)
            std::snprintf(buf, sizeof(buf), "notch %2d: %.4f mm\n", m.index, m.width);
        else
            std::snprintf(buf, sizeof(buf), "notch %2d: not observable\n", m.index);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "observable = %zu / %zu\nmean = %.4f mm\nmedian = %.4f mm\n"
                  "std = %.4f mm\n",
                  r.observable_count, r.notches.size(), r.mean_width,
                  r.median_width, r.std_width);
    out << buf;
    return out.str();
}

void write_notch_csv(const std::string& path, const NotchReport& r) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    out << "index,observable,width_mm\n";
    char buf[64];
    for (const NotchMeasurement& m : r.notches) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g\n", m.index, m.observable ? 1 : 0,
                      m.width);
        out << buf;
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace ntcr
