// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the reconstruction pipeline. Talks to the core
// exclusively through the public C API.
//
// Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ntcr/ntcr.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

int exit_code_for(ntcr_status status) {
    switch (status) {
        case NTCR_OK:
            return kExitOk;
        case NTCR_ERROR_CONFIG:
        case NTCR_ERROR_INVALID_ARGUMENT:
            return kExitConfig;
        default:
            return kExitStage;
    }
}

struct ConfigDeleter {
    void operator()(ntcr_config* c) const { ntcr_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<ntcr_config, ConfigDeleter>;

int report(ntcr_status status, const char* context) {
    if (status == NTCR_OK) return kExitOk;
    std::fprintf(stderr, "error: %s: %s\n", context, ntcr_last_error());
    return exit_code_for(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NTCR morphology reconstruction pipeline"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> set_pairs;
    long long seed_flag = 0;
    bool no_icp = false;
    bool print_config = false;

    app.add_option("--config", config_path, "Configuration file");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed_flag, "Override rig.seed");
    app.add_option("--set", set_pairs,
                   "Override a config key, e.g. --set icp.max_iterations=80")
        ->take_all();
    app.add_flag("--no-icp", no_icp, "Skip the relocation stage");
    app.add_flag("--print-config", print_config,
                 "Print the effective configuration and exit");

    auto* cmd_run = app.add_subcommand("run", "Run the full pipeline");
    auto* cmd_synth = app.add_subcommand("synth", "Render the synthetic depth maps");
    auto* cmd_project =
        app.add_subcommand("project", "Project depth maps to point clouds");
    auto* cmd_filter = app.add_subcommand("filter", "SOR + conditional + merge + MLS");
    auto* cmd_register =
        app.add_subcommand("register", "Align the capture to the reference geometry");
    auto* cmd_reconstruct =
        app.add_subcommand("reconstruct", "Poisson surface reconstruction");
    auto* cmd_metrics = app.add_subcommand("metrics", "Density and notch reports");

    std::string depth_path, camera_path;
    cmd_project->add_option("--depth", depth_path, "Depth PGM (single-camera mode)");
    cmd_project->add_option("--camera", camera_path, "Camera metadata file");
    std::vector<std::string> filter_inputs;
    cmd_filter->add_option("--input", filter_inputs, "Input PLY clouds")->take_all();
    std::string register_input, reconstruct_input, metrics_input;
    cmd_register->add_option("--input", register_input, "Input PLY cloud");
    cmd_reconstruct->add_option("--input", reconstruct_input, "Input PLY cloud");
    cmd_metrics->add_option("--input", metrics_input, "Input PLY cloud");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    // Build the effective configuration.
    ConfigPtr cfg;
    {
        ntcr_config* raw = nullptr;
        const ntcr_status status = config_path.empty()
                                       ? ntcr_config_create(&raw)
                                       : ntcr_config_load(config_path.c_str(), &raw);
        if (status != NTCR_OK) return report(status, "loading configuration");
        cfg.reset(raw);
    }

    // Parse --set pairs and reject conflicting sources for the same key.
    std::map<std::string, std::string> overrides;
    for (const std::string& pair : set_pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n",
                         pair.c_str());
            return kExitConfig;
        }
        const std::string key = pair.substr(0, eq);
        const std::string value = pair.substr(eq + 1);
        const auto it = overrides.find(key);
        if (it != overrides.end() && it->second != value) {
            std::fprintf(stderr,
                         "error: conflicting values for '%s': --set gave '%s' and "
                         "'%s'\n",
                         key.c_str(), it->second.c_str(), value.c_str());
            return kExitConfig;
        }
        overrides[key] = value;
    }
    if (app.count("--seed") > 0) {
        const std::string seed_value = std::to_string(seed_flag);
        const auto it = overrides.find("rig.seed");
        if (it != overrides.end() && it->second != seed_value) {
            std::fprintf(stderr,
                         "error: conflicting values for 'rig.seed': --seed gave '%s' "
                         "and --set gave '%s'\n",
                         seed_value.c_str(), it->second.c_str());
            return kExitConfig;
        }
        overrides["rig.seed"] = seed_value;
    }
    for (const auto& [key, value] : overrides) {
        const ntcr_status status =
            ntcr_config_set(cfg.get(), key.c_str(), value.c_str());
        if (status != NTCR_OK) return report(status, "applying override");
    }

    if (print_config) {
        char* text = nullptr;
        const ntcr_status status = ntcr_config_dump(cfg.get(), &text);
        if (status != NTCR_OK) return report(status, "dumping configuration");
        std::fputs(text, stdout);
        ntcr_string_destroy(text);
        return kExitOk;
    }

    {
        const ntcr_status status = ntcr_config_validate(cfg.get());
        if (status != NTCR_OK) return report(status, "validating configuration");
    }

    if (cmd_run->parsed() || app.get_subcommands().empty()) {
        char* manifest = nullptr;
        const ntcr_status status =
            ntcr_run_pipeline(cfg.get(), out_dir.c_str(), no_icp ? 0 : 1, &manifest);
        if (manifest != nullptr) {
            std::fputs(manifest, stdout);
            ntcr_string_destroy(manifest);
        }
        if (status != NTCR_OK) {
            std::fprintf(stderr, "error: pipeline failed: %s\n", ntcr_last_error());
            return exit_code_for(status);
        }
        return kExitOk;
    }

    if (cmd_synth->parsed())
        return report(ntcr_stage_synth(cfg.get(), out_dir.c_str()), "synth");
    if (cmd_project->parsed()) {
        if (depth_path.empty() != camera_path.empty()) {
            std::fprintf(stderr, "error: --depth and --camera must be given together\n");
            return kExitConfig;
        }
        return report(ntcr_stage_project(
                          cfg.get(), out_dir.c_str(),
                          depth_path.empty() ? nullptr : depth_path.c_str(),
                          camera_path.empty() ? nullptr : camera_path.c_str()),
                      "project");
    }
    if (cmd_filter->parsed()) {
        std::vector<const char*> inputs;
        for (const std::string& s : filter_inputs) inputs.push_back(s.c_str());
        return report(ntcr_stage_filter(cfg.get(), out_dir.c_str(),
                                        inputs.empty() ? nullptr : inputs.data(),
                                        inputs.size()),
                      "filter");
    }
    if (cmd_register->parsed())
        return report(ntcr_stage_register(
                          cfg.get(), out_dir.c_str(),
                          register_input.empty() ? nullptr : register_input.c_str()),
                      "register");
    if (cmd_reconstruct->parsed())
        return report(
            ntcr_stage_reconstruct(
                cfg.get(), out_dir.c_str(),
                reconstruct_input.empty() ? nullptr : reconstruct_input.c_str()),
            "reconstruct");
    if (cmd_metrics->parsed())
        return report(ntcr_stage_metrics(
                          cfg.get(), out_dir.c_str(),
                          metrics_input.empty() ? nullptr : metrics_input.c_str()),
                      "metrics");

    return kExitOk;
}
