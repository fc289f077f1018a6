// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "error.hpp"
#include "metrics.hpp"
#include "ntcr_model.hpp"
#include "test_util.hpp"

using namespace ntcr;

TEST_CASE("lambda matches the reported density-consistency ratios") {
    // Published operating points for the optimized / non-optimized clouds.
    CHECK(std::abs(pdc_lambda(1.5489, 3.9636) - 2.5590) <= 5e-4);
    CHECK(std::abs(pdc_lambda(0.9582, 2.2759) - 2.3752) <= 5e-4);
}

TEST_CASE("perfect lattice: one point per voxel") {
    PointCloud cloud;
    cloud.frame = "base";
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k)
                cloud.points.push_back(Vec3(i + 0.5, j + 0.5, k + 0.5));
    const PdcReport report = compute_pdc(cloud, 1.0);
    CHECK(report.mean_density == doctest::Approx(1.0));
    CHECK(report.std_density == doctest::Approx(0.0));
    CHECK(report.lambda == doctest::Approx(0.0));
    CHECK(report.total_voxel_count == 1000);
    CHECK(report.occupied_voxel_count == 1000);
    CHECK_FALSE(report.degenerate);
}

TEST_CASE("report internals stay consistent") {
    const PointCloud cloud = test::random_cloud(5000, 1, "base", -20, 20);
    const PdcReport report = compute_pdc(cloud, 0.5);
    CHECK(report.point_count == cloud.size());
    // Total count over voxels equals the cloud size: mean * total = N.
    CHECK(report.mean_density * static_cast<double>(report.total_voxel_count) ==
          doctest::Approx(static_cast<double>(cloud.size())).epsilon(1e-12));
    CHECK(report.lambda ==
          doctest::Approx(report.std_density / report.mean_density).epsilon(1e-9));
    CHECK(report.occupied_voxel_count <= report.total_voxel_count);
}

TEST_CASE("single point is degenerate with zero spread") {
    PointCloud cloud;
    cloud.frame = "base";
    cloud.points.push_back(Vec3(1, 2, 3));
    const PdcReport report = compute_pdc(cloud, 0.5);
    CHECK(report.degenerate);
    CHECK(report.std_density == 0.0);
    CHECK(report.lambda == 0.0);
}

TEST_CASE("lambda is invariant under lattice-preserving translations") {
    const PointCloud cloud = test::random_cloud(2000, 2, "base", -7, 7);
    const PdcReport base = compute_pdc(cloud, 0.5);
    for (const Vec3& shift :
         {Vec3(0.5, 0, 0), Vec3(0, 1.5, 0), Vec3(2.0, -0.5, 3.5)}) {
        PointCloud moved = cloud;
        for (Vec3& p : moved.points) p += shift;
        const PdcReport shifted = compute_pdc(moved, 0.5);
        CHECK(shifted.lambda == doctest::Approx(base.lambda).epsilon(1e-12));
        CHECK(shifted.mean_density == doctest::Approx(base.mean_density).epsilon(1e-12));
    }
}

TEST_CASE("pdc input validation") {
    CHECK_THROWS_AS(compute_pdc(PointCloud{}, 0.5), Error);
    PointCloud one;
    one.points.push_back(Vec3(0, 0, 0));
    CHECK_THROWS_AS(compute_pdc(one, 0.0), Error);
}

TEST_CASE("heatmap of a single point has one nonzero cell") {
    PointCloud cloud;
    cloud.frame = "base";
    cloud.points.push_back(Vec3(3, 4, 5));
    const Heatmap hm = density_heatmap(cloud, 0, 1, 0.5);
    CHECK(hm.nu == 1);
    CHECK(hm.nv == 1);
    CHECK(hm.at(0, 0) == 1);
}

TEST_CASE("heatmap counts sum to the cloud size") {
    const PointCloud cloud = test::random_cloud(3000, 3, "base", -15, 15);
    const Heatmap hm = density_heatmap(cloud, 0, 2, 0.5);
    std::uint64_t total = 0;
    for (const std::uint64_t c : hm.counts) total += c;
    CHECK(total == cloud.size());
}

TEST_CASE("uniform tube column sums follow the analytic profile") {
    NtcrSpec spec;
    spec.notch_count = 0;
    spec.bend_curvature = 0.0;
    const double density = 300.0;  // keeps Poisson noise well under the 10% gate
    const PointCloud cloud = sample_ntcr_surface(spec, density);
    const Heatmap hm = density_heatmap(cloud, 0, 1, 0.5);

    // Surface area per axial cell is circumference * cell, so each interior
    // column should hold density * that area.
    const double expected =
        density * 3.14159265358979323846 * spec.outer_diameter * hm.cell_size;
    for (int u = 1; u + 1 < hm.nu; ++u) {
        double column = 0.0;
        for (int v = 0; v < hm.nv; ++v) column += static_cast<double>(hm.at(u, v));
        CHECK(std::abs(column - expected) <= 0.10 * expected);
    }
}

TEST_CASE("heatmap exports") {
    const std::string dir = test::scratch_dir("heatmap");
    const PointCloud cloud = test::random_cloud(500, 4, "base", -5, 5);
    const Heatmap hm = density_heatmap(cloud, 0, 1, 1.0);
    write_heatmap_csv(dir + "/hm.csv", hm);
    write_heatmap_pgm(dir + "/hm.pgm", hm);
    std::ifstream csv(dir + "/hm.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line.find("axes=xy") != std::string::npos);
    std::ifstream pgm(dir + "/hm.pgm");
    std::getline(pgm, line);
    CHECK(line == "P5");
}

TEST_CASE("noise-free dense sample measures every notch at the cut width") {
    NtcrSpec spec;  // defaults: 16 notches, 1.5 mm wide
    spec.bend_curvature = 0.004;
    PointCloud cloud = sample_ntcr_surface(spec, 120.0);
    const NotchReport report = measure_notches(cloud, spec);

    CHECK(report.standard_width == doctest::Approx(1.5));
    REQUIRE(report.notches.size() == 16);
    CHECK(report.observable_count == 16);
    for (const NotchMeasurement& m : report.notches) {
        REQUIRE(m.observable);
        CHECK(m.width == doctest::Approx(1.5).epsilon(0.05 / 1.5));
    }
    CHECK(std::abs(report.mean_width - 1.5) <= 0.05);
    CHECK(report.median_width == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("straight and bent tubes measure alike") {
    for (const double curvature : {0.0, 0.008}) {
        NtcrSpec spec;
        spec.bend_curvature = curvature;
        const PointCloud cloud = sample_ntcr_surface(spec, 80.0);
        const NotchReport report = measure_notches(cloud, spec);
        CHECK(report.observable_count == 16);
        CHECK(std::abs(report.mean_width - 1.5) <= 0.05);
    }
}

TEST_CASE("no notches means an empty, flagged report") {
    NtcrSpec spec;
    spec.notch_count = 0;
    const PointCloud cloud = sample_ntcr_surface(spec, 60.0);
    const NotchReport report = measure_notches(cloud, spec);
    CHECK(report.empty);
    CHECK(report.notches.empty());
    CHECK(report.observable_count == 0);
}

TEST_CASE("unaligned frames are rejected") {
    NtcrSpec spec;
    PointCloud cloud = sample_ntcr_surface(spec, 60.0);
    cloud.frame = "base";
    CHECK_THROWS_AS(measure_notches(cloud, spec), Error);

    PointCloud empty;
    empty.frame = kReferenceFrame;
    CHECK_THROWS_AS(measure_notches(empty, spec), Error);
}

TEST_CASE("report writers produce the documented layouts") {
    const std::string dir = test::scratch_dir("metric_reports");
    NtcrSpec spec;
    const PointCloud cloud = sample_ntcr_surface(spec, 80.0);

    const PdcReport pdc = compute_pdc(cloud, 0.5);
    write_pdc_csv(dir + "/pdc.csv", pdc);
    std::ifstream csv(dir + "/pdc.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "voxel_size,mean_density,std_density,lambda,occupied_voxels,total_voxels,"
          "points");
    CHECK(pdc_report_text(pdc).find("lambda") != std::string::npos);

    const NotchReport notch = measure_notches(cloud, spec);
    write_notch_csv(dir + "/notch.csv", notch);
    std::ifstream ncsv(dir + "/notch.csv");
    std::getline(ncsv, header);
    CHECK(header == "index,observable,width_mm");
    CHECK(notch_report_text(notch).find("observable = 16 / 16") != std::string::npos);
}
