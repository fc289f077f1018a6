// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "kdtree.hpp"
#include "metrics.hpp"
#include "pgm_io.hpp"
#include "registration.hpp"
#include "render.hpp"
#include "rng.hpp"
#include "surface_recon.hpp"

namespace fs = std::filesystem;

namespace ntcr {

namespace artifact {
std::string depth_pgm(int cam) { return "cam" + std::to_string(cam) + "_depth.pgm"; }
std::string camera_meta(int cam) { return "cam" + std::to_string(cam) + ".cam"; }
std::string raw_cloud(int cam) { return "cloud_cam" + std::to_string(cam) + ".ply"; }
std::string sor_cloud(int cam) { return "cloud_sor_cam" + std::to_string(cam) + ".ply"; }
std::string sor_report(int cam) {
    return "sor_removed_cam" + std::to_string(cam) + ".csv";
}
std::string cond_cloud(int cam) {
    return "cloud_cond_cam" + std::to_string(cam) + ".ply";
}
}  // namespace artifact

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
public:
    StageTimer(Manifest& m, std::string name) : manifest_(m), start_(Clock::now()) {
        record_.name = std::move(name);
    }
    StageRecord& record() { return record_; }
    void commit() {
        record_.millis =
            std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
        manifest_.stages.push_back(record_);
    }

private:
    Manifest& manifest_;
    StageRecord record_;
    Clock::time_point start_;
};

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// True camera poses plus the estimated (calibration-error) poses the
// downstream pipeline believes in. Deterministic in the seed.
struct RigSetup {
    VirtualCamera cams[2];
    RigidTransform estimated_world_from_camera[2];
};

RigSetup build_rig(const PipelineConfig& cfg) {
    RigSetup rig;
    auto [front, back] = make_opposed_rig(cfg.rig_standoff, cfg.camera);
    rig.cams[0] = front;
    rig.cams[1] = back;
    for (int i = 0; i < 2; ++i) {
        RigidTransform err = RigidTransform::identity();
        if (cfg.rig_pose_error_deg > 0 || cfg.rig_pose_error_mm > 0) {
            SequentialRng rng(derive_seed(cfg.seed, 0xca11b + i));
            const auto unit = [&rng] {
                Vec3 v(rng.normal(), rng.normal(), rng.normal());
                while (v.norm() < 1e-6) v = Vec3(rng.normal(), rng.normal(), rng.normal());
                return Vec3(v.normalized());
            };
            const double angle = cfg.rig_pose_error_deg * 3.14159265358979323846 / 180.0;
            err = rotation_about(unit(), angle, cfg.rig_pose_error_mm * unit());
        }
        // World-side estimation error: the believed pose is true-pose * err.
        rig.estimated_world_from_camera[i] =
            (rig.cams[i].pose * err).inverse();
    }
    return rig;
}

std::shared_ptr<const Scene> build_scene(const PipelineConfig& cfg) {
    auto set = std::make_shared<SceneSet>();
    set->add(std::make_shared<NtcrScene>(cfg.ntcr));
    if (cfg.rig_backdrop) {
        // Tilted plate beside the tube: visible to both cameras at an angle
        // without occluding the robot.
        const double s = std::sqrt(0.5);
        set->add(std::make_shared<PlaneScene>(Vec3(0, 10, 0), Vec3(1, 0, 0),
                                              Vec3(0, s, -s), 30.0,
                                              4.0 * std::sqrt(2.0), kLabelBackdrop));
    }
    return set;
}

bool ingest_mode(const PipelineConfig& cfg) { return !cfg.input_depth0.empty(); }

std::string depth_source(const PipelineConfig& cfg, const std::string& out_dir, int cam) {
    if (ingest_mode(cfg)) return cam == 0 ? cfg.input_depth0 : cfg.input_depth1;
    return join(out_dir, artifact::depth_pgm(cam));
}

std::string camera_source(const PipelineConfig& cfg, const std::string& out_dir,
                          int cam) {
    if (ingest_mode(cfg)) return cam == 0 ? cfg.input_camera0 : cfg.input_camera1;
    return join(out_dir, artifact::camera_meta(cam));
}

PointCloud load_cloud(const std::string& path) {
    return read_ply_cloud(path).cloud;
}

}  // namespace

void stage_synth(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m) {
    StageTimer timer(m, "synth");
    if (ingest_mode(cfg)) {
        for (const std::string& path :
             {cfg.input_depth0, cfg.input_camera0, cfg.input_depth1, cfg.input_camera1}) {
            if (!fs::exists(path))
                fail(ErrorCode::Io, "input file does not exist: " + path);
            timer.record().files.push_back(path);
        }
        timer.record().note = "ingesting pre-rendered depth maps";
        timer.commit();
        return;
    }

    const RigSetup rig = build_rig(cfg);
    const auto scene = build_scene(cfg);
    for (int cam = 0; cam < 2; ++cam) {
        RenderResult render =
            render_depth_scene(*scene, rig.cams[cam], derive_seed(cfg.seed, cam));
        if (render.empty_frustum)
            timer.record().note += "camera " + std::to_string(cam) +
                                   ": empty frustum, all pixels invalid; ";
        // Downstream consumers get the estimated (imperfect) extrinsics.
        render.map.camera_pose = rig.estimated_world_from_camera[cam];
        write_depth_pgm(join(out_dir, artifact::depth_pgm(cam)), render.map);
        write_camera_meta(join(out_dir, artifact::camera_meta(cam)), render.map);
        timer.record().files.push_back(artifact::depth_pgm(cam));
        timer.record().files.push_back(artifact::camera_meta(cam));
    }
    timer.commit();
}

void stage_project(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                   const StageOverrides* ov) {
    StageTimer timer(m, "project");
    if (ov != nullptr && !ov->depth_path.empty()) {
        const DepthMap map = read_depth_map(ov->depth_path, ov->camera_path);
        const CloudFromDepthResult result = depth_to_cloud(map);
        for (const std::string& w : result.warnings) timer.record().note += w + "; ";
        write_ply(join(out_dir, artifact::raw_cloud(0)), result.cloud, cfg.ply_format);
        timer.record().files.push_back(artifact::raw_cloud(0));
        timer.commit();
        return;
    }
    for (int cam = 0; cam < 2; ++cam) {
        const DepthMap map = read_depth_map(depth_source(cfg, out_dir, cam),
                                            camera_source(cfg, out_dir, cam));
        const CloudFromDepthResult result = depth_to_cloud(map);
        for (const std::string& w : result.warnings)
            timer.record().note += "camera " + std::to_string(cam) + ": " + w + "; ";
        write_ply(join(out_dir, artifact::raw_cloud(cam)), result.cloud, cfg.ply_format);
        timer.record().files.push_back(artifact::raw_cloud(cam));
    }
    timer.commit();
}

void stage_filter(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                  const StageOverrides* ov) {
    std::vector<std::string> inputs;
    if (ov != nullptr && !ov->inputs.empty()) {
        inputs = ov->inputs;
    } else {
        inputs = {join(out_dir, artifact::raw_cloud(0)),
                  join(out_dir, artifact::raw_cloud(1))};
    }

    // Outlier removal per camera (cloud statistics would be corrupted by the
    // inter-sheet gap if run after merging).
    std::vector<PointCloud> clouds;
    {
        StageTimer timer(m, "sor");
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            PointCloud cloud = load_cloud(inputs[i]);
            if (cfg.sor_enabled) {
                SorResult result = sor_filter(cloud, cfg.sor);
                write_sor_report(join(out_dir, artifact::sor_report(static_cast<int>(i))),
                                 result);
                timer.record().files.push_back(artifact::sor_report(static_cast<int>(i)));
                cloud = std::move(result.cloud);
            } else {
                timer.record().note = "disabled; clouds passed through";
            }
            write_ply(join(out_dir, artifact::sor_cloud(static_cast<int>(i))), cloud,
                      cfg.ply_format);
            timer.record().files.push_back(artifact::sor_cloud(static_cast<int>(i)));
        }
        timer.commit();
    }
    {
        StageTimer timer(m, "conditional");
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            PointCloud cloud = load_cloud(join(out_dir, artifact::sor_cloud(static_cast<int>(i))));
            cloud = conditional_filter(cloud, cfg.conditional);
            write_ply(join(out_dir, artifact::cond_cloud(static_cast<int>(i))), cloud,
                      cfg.ply_format);
            timer.record().files.push_back(artifact::cond_cloud(static_cast<int>(i)));
        }
        timer.commit();
    }
    {
        StageTimer timer(m, "merge");
        PointCloud merged;
        for (std::size_t i = 0; i < inputs.size(); ++i)
            merged = merge_clouds(
                merged, load_cloud(join(out_dir, artifact::cond_cloud(static_cast<int>(i)))));
        write_ply(join(out_dir, artifact::kMerged), merged, cfg.ply_format);
        timer.record().files.push_back(artifact::kMerged);
        timer.commit();
    }
    {
        StageTimer timer(m, "mls");
        PointCloud merged = load_cloud(join(out_dir, artifact::kMerged));
        if (cfg.mls_enabled && !merged.empty()) {
            const MlsResult result = mls_smooth(merged, cfg.mls);
            if (result.passed_through > 0)
                timer.record().note = std::to_string(result.passed_through) +
                                      " points passed through unsmoothed";
            merged = result.cloud;
        } else if (!cfg.mls_enabled) {
            timer.record().note = "disabled; cloud passed through";
        }
        write_ply(join(out_dir, artifact::kSmoothed), merged, cfg.ply_format);
        timer.record().files.push_back(artifact::kSmoothed);
        timer.commit();
    }
}

void stage_register(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                    const StageOverrides* ov) {
    StageTimer timer(m, "relocate");
    const std::string input = ov != nullptr && !ov->inputs.empty()
                                  ? ov->inputs.front()
                                  : join(out_dir, artifact::kSmoothed);
    const PointCloud capture = load_cloud(input);
    if (capture.empty()) fail(ErrorCode::Stage, "relocate: capture cloud is empty");

    // The reference is written first and read back, so the alignment runs on
    // exactly the same float32 payload an external consumer would see.
    {
        const PointCloud reference =
            sample_ntcr_surface(cfg.ntcr, cfg.icp.reference_density);
        write_ply(join(out_dir, artifact::kReference), reference, cfg.ply_format);
        timer.record().files.push_back(artifact::kReference);
    }
    const PointCloud reference = load_cloud(join(out_dir, artifact::kReference));

    const IcpResult result = icp_align(capture, reference, cfg.icp);
    const PointCloud aligned = apply_transform(capture, result.transform, kReferenceFrame);
    write_ply(join(out_dir, artifact::kAligned), aligned, cfg.ply_format);
    write_icp_report(join(out_dir, artifact::kIcpReport), result);
    timer.record().files.push_back(artifact::kAligned);
    timer.record().files.push_back(artifact::kIcpReport);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "converged=%d iterations=%d rms=%.6g",
                  result.converged ? 1 : 0, result.iterations_used, result.rms_residual);
    timer.record().note = buf;
    timer.commit();
}

void stage_reconstruct(const PipelineConfig& cfg, const std::string& out_dir,
                       Manifest& m, const StageOverrides* ov) {
    StageTimer timer(m, "reconstruct");
    const std::string input = ov != nullptr && !ov->inputs.empty()
                                  ? ov->inputs.front()
                                  : join(out_dir, artifact::kAligned);
    PointCloud cloud = load_cloud(input);
    if (cloud.empty()) fail(ErrorCode::Stage, "reconstruct: input cloud is empty");

    if (!cloud.has_normals()) {
        const std::vector<Vec3> hints = {Vec3(0, 0, -cfg.rig_standoff),
                                         Vec3(0, 0, cfg.rig_standoff)};
        const NormalEstimationResult est =
            estimate_normals(cloud, cfg.recon_normal_k, hints);
        if (est.dropped > 0)
            timer.record().note = std::to_string(est.dropped) +
                                  " points dropped (degenerate neighborhoods); ";
        cloud = est.cloud;
    }

    PoissonParams params;
    params.voxel_size = cfg.recon_voxel_size;
    params.max_cells = cfg.recon_max_cells;
    const PoissonResult result = poisson_reconstruct(cloud, params);
    write_ply(join(out_dir, artifact::kMeshPly), result.mesh, cfg.ply_format);
    write_obj(join(out_dir, artifact::kMeshObj), result.mesh);
    timer.record().files.push_back(artifact::kMeshPly);
    timer.record().files.push_back(artifact::kMeshObj);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "vertices=%zu triangles=%zu watertight=%d",
                  result.mesh.vertices.size(), result.mesh.triangles.size(),
                  result.watertight ? 1 : 0);
    timer.record().note += buf;
    timer.commit();
}

void stage_metrics(const PipelineConfig& cfg, const std::string& out_dir, Manifest& m,
                   const StageOverrides* ov) {
    StageTimer timer(m, "metrics");
    const std::string input = ov != nullptr && !ov->inputs.empty()
                                  ? ov->inputs.front()
                                  : join(out_dir, artifact::kAligned);
    const PointCloud cloud = load_cloud(input);
    if (cloud.empty()) fail(ErrorCode::Stage, "metrics: input cloud is empty");

    const PdcReport pdc = compute_pdc(cloud, cfg.pdc_voxel_size);
    write_pdc_csv(join(out_dir, artifact::kPdcCsv), pdc);
    {
        std::ofstream out(join(out_dir, artifact::kPdcTxt));
        out << pdc_report_text(pdc);
    }
    timer.record().files.push_back(artifact::kPdcCsv);
    timer.record().files.push_back(artifact::kPdcTxt);

    const Heatmap hm = density_heatmap(cloud, cfg.heatmap_axis_u, cfg.heatmap_axis_v,
                                       cfg.heatmap_cell_size);
    write_heatmap_csv(join(out_dir, artifact::kHeatmapCsv), hm);
    write_heatmap_pgm(join(out_dir, artifact::kHeatmapPgm), hm);
    timer.record().files.push_back(artifact::kHeatmapCsv);
    timer.record().files.push_back(artifact::kHeatmapPgm);

    if (cloud.frame == kReferenceFrame) {
        const NotchReport notch = measure_notches(cloud, cfg.ntcr);
        write_notch_csv(join(out_dir, artifact::kNotchCsv), notch);
        {
            std::ofstream out(join(out_dir, artifact::kNotchTxt));
            out << notch_report_text(notch);
        }
        timer.record().files.push_back(artifact::kNotchCsv);
        timer.record().files.push_back(artifact::kNotchTxt);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "notches observable=%zu/%zu mean_width=%.4f",
                      notch.observable_count, notch.notches.size(), notch.mean_width);
        timer.record().note = buf;
    } else {
        timer.record().note =
            "notch measurement skipped: cloud is not in the reference frame";
    }
    timer.commit();
}

std::string Manifest::text() const {
    std::ostringstream out;
    out << "# pipeline manifest\n";
    out << "status = " << (ok ? "ok" : "failed") << "\n";
    if (!ok) {
        out << "error_stage = " << error_stage << "\n";
        out << "error = " << error_message << "\n";
    }
    out << "stages = " << stages.size() << "\n";
    char buf[64];
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const StageRecord& s = stages[i];
        std::snprintf(buf, sizeof(buf), "stage %02zu %-12s %9.2f ms ", i + 1,
                      s.name.c_str(), s.millis);
        out << buf << " files:";
        for (const std::string& f : s.files) out << ' ' << f;
        if (!s.note.empty()) out << "  note: " << s.note;
        out << "\n";
    }
    return out.str();
}

Manifest run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                      bool enable_icp) {
    Manifest manifest;
    validate_config(cfg);

    // Up-front input validation: a bad configuration must not leave partial
    // artifacts behind.
    if (ingest_mode(cfg)) {
        for (const std::string& path :
             {cfg.input_depth0, cfg.input_camera0, cfg.input_depth1, cfg.input_camera1}) {
            if (!fs::exists(path)) {
                manifest.ok = false;
                manifest.error_stage = "synth";
                manifest.error_message = "input file does not exist: " + path;
                return manifest;
            }
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        manifest.ok = false;
        manifest.error_stage = "setup";
        manifest.error_message = "cannot create output directory: " + out_dir;
        return manifest;
    }

    const bool icp = enable_icp && cfg.icp_enabled;
    std::string current = "synth";
    try {
        stage_synth(cfg, out_dir, manifest);
        current = "project";
        stage_project(cfg, out_dir, manifest);
        current = "filter";
        stage_filter(cfg, out_dir, manifest);
        current = "relocate";
        if (icp) {
            stage_register(cfg, out_dir, manifest);
        } else {
            StageRecord rec;
            rec.name = "relocate";
            rec.note = "skipped (icp disabled)";
            manifest.stages.push_back(rec);
        }
        current = "reconstruct";
        StageOverrides recon_in;
        recon_in.inputs = {join(out_dir, icp ? artifact::kAligned : artifact::kSmoothed)};
        stage_reconstruct(cfg, out_dir, manifest, &recon_in);
        current = "metrics";
        stage_metrics(cfg, out_dir, manifest, &recon_in);
    } catch (const Error& e) {
        manifest.ok = false;
        manifest.error_stage = current;
        manifest.error_message = e.what();
    }

    std::ofstream out(join(out_dir, artifact::kManifest));
    out << manifest.text();
    return manifest;
}

}  // namespace ntcr
