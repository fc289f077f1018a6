/* Copyright 2026 The ntcr-recon Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the NTCR morphology reconstruction pipeline. All functions
 * return ntcr_status; on failure ntcr_last_error() describes the problem
 * for the calling thread. Objects returned through out-parameters are owned
 * by the caller and released with the matching *_destroy function.
 */

#ifndef NTCR_NTCR_H
#define NTCR_NTCR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ntcr_status {
    NTCR_OK = 0,
    NTCR_ERROR_INVALID_ARGUMENT = 1,
    NTCR_ERROR_CONFIG = 2,
    NTCR_ERROR_STAGE = 3,
    NTCR_ERROR_IO = 4,
} ntcr_status;

typedef struct ntcr_config ntcr_config;  /* pipeline configuration */
typedef struct ntcr_cloud ntcr_cloud;    /* point cloud handle */

const char* ntcr_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* ntcr_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* Built-in defaults (the standard synthetic scenario). */
ntcr_status ntcr_config_create(ntcr_config** out);

/* Parse a sectioned key-value file over the defaults. */
ntcr_status ntcr_config_load(const char* path, ntcr_config** out);

/* Apply one "section.key" override, e.g. ("rig.seed", "7"). */
ntcr_status ntcr_config_set(ntcr_config* cfg, const char* key, const char* value);

/* Canonical text dump; free with ntcr_string_destroy. */
ntcr_status ntcr_config_dump(const ntcr_config* cfg, char** text_out);

/* Validate every section against the pipeline's invariants. */
ntcr_status ntcr_config_validate(const ntcr_config* cfg);

void ntcr_config_destroy(ntcr_config* cfg);
void ntcr_string_destroy(char* text);

/* ---- pipeline and stages ---------------------------------------------- */

/* Full pipeline into out_dir. enable_icp=0 skips the relocation stage.
 * *manifest_out (optional, may be NULL) receives the manifest text even on
 * stage failure; free with ntcr_string_destroy. */
ntcr_status ntcr_run_pipeline(const ntcr_config* cfg, const char* out_dir,
                              int enable_icp, char** manifest_out);

/* Individual stages sharing out_dir conventions with ntcr_run_pipeline.
 * Optional path arguments override the canonical stage inputs; pass NULL to
 * use the defaults. */
ntcr_status ntcr_stage_synth(const ntcr_config* cfg, const char* out_dir);
ntcr_status ntcr_stage_project(const ntcr_config* cfg, const char* out_dir,
                               const char* depth_pgm_or_null,
                               const char* camera_meta_or_null);
ntcr_status ntcr_stage_filter(const ntcr_config* cfg, const char* out_dir,
                              const char* const* input_plys_or_null,
                              size_t input_count);
ntcr_status ntcr_stage_register(const ntcr_config* cfg, const char* out_dir,
                                const char* input_ply_or_null);
ntcr_status ntcr_stage_reconstruct(const ntcr_config* cfg, const char* out_dir,
                                   const char* input_ply_or_null);
ntcr_status ntcr_stage_metrics(const ntcr_config* cfg, const char* out_dir,
                               const char* input_ply_or_null);

/* ---- point cloud inspection ------------------------------------------- */

ntcr_status ntcr_cloud_load_ply(const char* path, ntcr_cloud** out);
ntcr_status ntcr_cloud_save_ply(const ntcr_cloud* cloud, const char* path,
                                int binary);
size_t ntcr_cloud_size(const ntcr_cloud* cloud);
/* Frame label; free with ntcr_string_destroy. */
ntcr_status ntcr_cloud_frame(const ntcr_cloud* cloud, char** frame_out);
/* Copies points as x,y,z triples (millimeters) into the caller's buffer of
 * 3*count doubles. */
ntcr_status ntcr_cloud_points(const ntcr_cloud* cloud, double* xyz_out,
                              size_t count);
void ntcr_cloud_destroy(ntcr_cloud* cloud);

#ifdef __cplusplus
}
#endif

#endif /* NTCR_NTCR_H */
