// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntcr/ntcr.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "ply_io.hpp"

namespace {

thread_local std::string g_last_error;

void ensure_out_dir(const char* out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        ntcr::fail(ntcr::ErrorCode::Io,
                   std::string("cannot create output directory: ") + out_dir);
}

ntcr_status status_of(const ntcr::Error& e) {
    switch (e.code()) {
        case ntcr::ErrorCode::InvalidArgument:
            return NTCR_ERROR_INVALID_ARGUMENT;
        case ntcr::ErrorCode::Config:
            return NTCR_ERROR_CONFIG;
        case ntcr::ErrorCode::Stage:
            return NTCR_ERROR_STAGE;
        case ntcr::ErrorCode::Io:
            return NTCR_ERROR_IO;
    }
    return NTCR_ERROR_STAGE;
}

// Runs fn, translating exceptions into status codes + g_last_error.
template <typename Fn>
ntcr_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return NTCR_OK;
    } catch (const ntcr::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NTCR_ERROR_STAGE;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ntcr_status invalid(const char* msg) {
    g_last_error = msg;
    return NTCR_ERROR_INVALID_ARGUMENT;
}

}  // namespace

struct ntcr_config {
    ntcr::PipelineConfig cfg;
};

struct ntcr_cloud {
    ntcr::PointCloud cloud;
};

extern "C" {

const char* ntcr_version(void) { return "1.0.0"; }

const char* ntcr_last_error(void) { return g_last_error.c_str(); }

ntcr_status ntcr_config_create(ntcr_config** out) {
    if (out == nullptr) return invalid("out must not be NULL");
    return guarded([&] { *out = new ntcr_config{ntcr::default_config()}; });
}

ntcr_status ntcr_config_load(const char* path, ntcr_config** out) {
    if (path == nullptr || out == nullptr)
        return invalid("path and out must not be NULL");
    return guarded([&] { *out = new ntcr_config{ntcr::load_config(path)}; });
}

ntcr_status ntcr_config_set(ntcr_config* cfg, const char* key, const char* value) {
    if (cfg == nullptr || key == nullptr || value == nullptr)
        return invalid("cfg, key and value must not be NULL");
    return guarded([&] { ntcr::apply_config_override(cfg->cfg, key, value); });
}

ntcr_status ntcr_config_dump(const ntcr_config* cfg, char** text_out) {
    if (cfg == nullptr || text_out == nullptr)
        return invalid("cfg and text_out must not be NULL");
    return guarded([&] { *text_out = dup_string(ntcr::dump_config(cfg->cfg)); });
}

ntcr_status ntcr_config_validate(const ntcr_config* cfg) {
    if (cfg == nullptr) return invalid("cfg must not be NULL");
    return guarded([&] { ntcr::validate_config(cfg->cfg); });
}

void ntcr_config_destroy(ntcr_config* cfg) { delete cfg; }

void ntcr_string_destroy(char* text) { delete[] text; }

ntcr_status ntcr_run_pipeline(const ntcr_config* cfg, const char* out_dir,
                              int enable_icp, char** manifest_out) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    ntcr::Manifest manifest;
    const ntcr_status status = guarded(
        [&] { manifest = ntcr::run_pipeline(cfg->cfg, out_dir, enable_icp != 0); });
    if (manifest_out != nullptr) *manifest_out = dup_string(manifest.text());
    if (status != NTCR_OK) return status;
    if (!manifest.ok) {
        g_last_error = "stage " + manifest.error_stage + ": " + manifest.error_message;
        return NTCR_ERROR_STAGE;
    }
    return NTCR_OK;
}

ntcr_status ntcr_stage_synth(const ntcr_config* cfg, const char* out_dir) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    return guarded([&] {
        ntcr::validate_config(cfg->cfg);
        ensure_out_dir(out_dir);
        ntcr::Manifest m;
        ntcr::stage_synth(cfg->cfg, out_dir, m);
    });
}

ntcr_status ntcr_stage_project(const ntcr_config* cfg, const char* out_dir,
                               const char* depth_pgm_or_null,
                               const char* camera_meta_or_null) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    if ((depth_pgm_or_null == nullptr) != (camera_meta_or_null == nullptr))
        return invalid("depth and camera overrides must be given together");
    return guarded([&] {
        ntcr::validate_config(cfg->cfg);
        ensure_out_dir(out_dir);
        ntcr::Manifest m;
        ntcr::StageOverrides ov;
        if (depth_pgm_or_null != nullptr) {
            ov.depth_path = depth_pgm_or_null;
            ov.camera_path = camera_meta_or_null;
        }
        ntcr::stage_project(cfg->cfg, out_dir, m, &ov);
    });
}

ntcr_status ntcr_stage_filter(const ntcr_config* cfg, const char* out_dir,
                              const char* const* input_plys_or_null,
                              size_t input_count) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    return guarded([&] {
        ntcr::validate_config(cfg->cfg);
        ensure_out_dir(out_dir);
        ntcr::Manifest m;
        ntcr::StageOverrides ov;
        if (input_plys_or_null != nullptr)
            for (size_t i = 0; i < input_count; ++i)
                ov.inputs.emplace_back(input_plys_or_null[i]);
        ntcr::stage_filter(cfg->cfg, out_dir, m, &ov);
    });
}

ntcr_status ntcr_stage_register(const ntcr_config* cfg, const char* out_dir,
                                const char* input_ply_or_null) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    return guarded([&] {
        ntcr::validate_config(cfg->cfg);
        ensure_out_dir(out_dir);
        ntcr::Manifest m;
        ntcr::StageOverrides ov;
        if (input_ply_or_null != nullptr) ov.inputs.emplace_back(input_ply_or_null);
        ntcr::stage_register(cfg->cfg, out_dir, m, &ov);
    });
}

ntcr_status ntcr_stage_reconstruct(const ntcr_config* cfg, const char* out_dir,
                                   const char* input_ply_or_null) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    return guarded([&] {
        ntcr::validate_config(cfg->cfg);
        ensure_out_dir(out_dir);
        ntcr::Manifest m;
        ntcr::StageOverrides ov;
        if (input_ply_or_null != nullptr) ov.inputs.emplace_back(input_ply_or_null);
        ntcr::stage_reconstruct(cfg->cfg, out_dir, m, &ov);
    });
}

ntcr_status ntcr_stage_metrics(const ntcr_config* cfg, const char* out_dir,
                               const char* input_ply_or_null) {
    if (cfg == nullptr || out_dir == nullptr)
        return invalid("cfg and out_dir must not be NULL");
    return guarded([&] {
        ntcr::validate_config(cfg->cfg);
        ensure_out_dir(out_dir);
        ntcr::Manifest m;
        ntcr::StageOverrides ov;
        if (input_ply_or_null != nullptr) ov.inputs.emplace_back(input_ply_or_null);
        ntcr::stage_metrics(cfg->cfg, out_dir, m, &ov);
    });
}

ntcr_status ntcr_cloud_load_ply(const char* path, ntcr_cloud** out) {
    if (path == nullptr || out == nullptr)
        return invalid("path and out must not be NULL");
    return guarded([&] {
        *out = new ntcr_cloud{ntcr::read_ply_cloud(path).cloud};
    });
}

ntcr_status ntcr_cloud_save_ply(const ntcr_cloud* cloud, const char* path,
                                int binary) {
    if (cloud == nullptr || path == nullptr)
        return invalid("cloud and path must not be NULL");
    return guarded([&] {
        ntcr::write_ply(path, cloud->cloud,
                        binary != 0 ? ntcr::PlyFormat::BinaryLittleEndian
                                    : ntcr::PlyFormat::Ascii);
    });
}

size_t ntcr_cloud_size(const ntcr_cloud* cloud) {
    return cloud == nullptr ? 0 : cloud->cloud.size();
}

ntcr_status ntcr_cloud_frame(const ntcr_cloud* cloud, char** frame_out) {
    if (cloud == nullptr || frame_out == nullptr)
        return invalid("cloud and frame_out must not be NULL");
    *frame_out = dup_string(cloud->cloud.frame);
    return NTCR_OK;
}

ntcr_status ntcr_cloud_points(const ntcr_cloud* cloud, double* xyz_out, size_t count) {
    if (cloud == nullptr || xyz_out == nullptr)
        return invalid("cloud and xyz_out must not be NULL");
    if (count > cloud->cloud.size())
        return invalid("count exceeds the cloud size");
    for (size_t i = 0; i < count; ++i) {
        xyz_out[3 * i + 0] = cloud->cloud.points[i].x();
        xyz_out[3 * i + 1] = cloud->cloud.points[i].y();
        xyz_out[3 * i + 2] = cloud->cloud.points[i].z();
    }
    return NTCR_OK;
}

void ntcr_cloud_destroy(ntcr_cloud* cloud) { delete cloud; }

}  // extern "C"
