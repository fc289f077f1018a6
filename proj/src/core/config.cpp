// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "error.hpp"

namespace ntcr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::Config, "config: bad number for '" + key + "': '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::Config, "config: bad integer for '" + key + "': '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    fail(ErrorCode::Config, "config: bad boolean for '" + key + "': '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    Vec3 v;
    if (!(in >> v.x() >> v.y() >> v.z()))
        fail(ErrorCode::Config, "config: expected three numbers for '" + key + "'");
    std::string rest;
    if (in >> rest)
        fail(ErrorCode::Config, "config: trailing text for '" + key + "': '" + rest + "'");
    return v;
}

struct Binding {
    std::string key;  // "section.name"
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

std::vector<Binding> make_bindings() {
    std::vector<Binding> b;
    const auto num = [&b](const char* key, auto member) {
        b.push_back({key,
                     [member](const PipelineConfig& c) { return fmt_num(c.*member); },
                     [member, key](PipelineConfig& c, const std::string& v) {
                         c.*member = parse_double(key, v);
                     }});
    };
    const auto boolean = [&b](const char* key, auto member) {
        b.push_back({key,
                     [member](const PipelineConfig& c) {
                         return std::string(c.*member ? "true" : "false");
                     },
                     [member, key](PipelineConfig& c, const std::string& v) {
                         c.*member = parse_bool(key, v);
                     }});
    };

    // [ntcr]
    b.push_back({"ntcr.outer_diameter",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.outer_diameter); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.outer_diameter = parse_double("ntcr.outer_diameter", v);
                 }});
    b.push_back({"ntcr.wall_thickness",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.wall_thickness); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.wall_thickness = parse_double("ntcr.wall_thickness", v);
                 }});
    b.push_back({"ntcr.tube_length",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.tube_length); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.tube_length = parse_double("ntcr.tube_length", v);
                 }});
    b.push_back({"ntcr.notch_count",
                 [](const PipelineConfig& c) { return std::to_string(c.ntcr.notch_count); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.notch_count =
                         static_cast<int>(parse_int("ntcr.notch_count", v));
                 }});
    b.push_back({"ntcr.notch_width",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.notch_width); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.notch_width = parse_double("ntcr.notch_width", v);
                 }});
    b.push_back({"ntcr.notch_depth",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.notch_depth); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.notch_depth = parse_double("ntcr.notch_depth", v);
                 }});
    b.push_back({"ntcr.notch_spacing",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.notch_spacing); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.notch_spacing = parse_double("ntcr.notch_spacing", v);
                 }});
    b.push_back({"ntcr.notch_phase_deg",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.notch_phase_deg); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.notch_phase_deg = parse_double("ntcr.notch_phase_deg", v);
                 }});
    b.push_back({"ntcr.bend_curvature",
                 [](const PipelineConfig& c) { return fmt_num(c.ntcr.bend_curvature); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.ntcr.bend_curvature = parse_double("ntcr.bend_curvature", v);
                 }});

    // [rig]
    num("rig.standoff", &PipelineConfig::rig_standoff);
    b.push_back({"rig.seed",
                 [](const PipelineConfig& c) { return std::to_string(c.seed); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.seed = static_cast<std::uint64_t>(parse_int("rig.seed", v));
                 }});
    num("rig.pose_error_deg", &PipelineConfig::rig_pose_error_deg);
    num("rig.pose_error_mm", &PipelineConfig::rig_pose_error_mm);
    boolean("rig.backdrop", &PipelineConfig::rig_backdrop);

    // [camera]
    b.push_back({"camera.width",
                 [](const PipelineConfig& c) { return std::to_string(c.camera.width); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.width = static_cast<int>(parse_int("camera.width", v));
                 }});
    b.push_back({"camera.height",
                 [](const PipelineConfig& c) { return std::to_string(c.camera.height); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.height = static_cast<int>(parse_int("camera.height", v));
                 }});
    b.push_back({"camera.fx",
                 [](const PipelineConfig& c) { return fmt_num(c.camera.intrinsics.fx); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.intrinsics.fx = parse_double("camera.fx", v);
                 }});
    b.push_back({"camera.fy",
                 [](const PipelineConfig& c) { return fmt_num(c.camera.intrinsics.fy); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.intrinsics.fy = parse_double("camera.fy", v);
                 }});
    b.push_back({"camera.cx",
                 [](const PipelineConfig& c) { return fmt_num(c.camera.intrinsics.cx); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.intrinsics.cx = parse_double("camera.cx", v);
                 }});
    b.push_back({"camera.cy",
                 [](const PipelineConfig& c) { return fmt_num(c.camera.intrinsics.cy); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.intrinsics.cy = parse_double("camera.cy", v);
                 }});
    b.push_back({"camera.baseline",
                 [](const PipelineConfig& c) { return fmt_num(c.camera.stereo_baseline); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.stereo_baseline = parse_double("camera.baseline", v);
                 }});
    b.push_back({"camera.depth_noise_fraction",
                 [](const PipelineConfig& c) {
                     return fmt_num(c.camera.depth_noise_fraction);
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.depth_noise_fraction =
                         parse_double("camera.depth_noise_fraction", v);
                 }});
    b.push_back({"camera.disparity_quantization",
                 [](const PipelineConfig& c) {
                     return fmt_num(c.camera.disparity_quantization);
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     c.camera.disparity_quantization =
                         parse_double("camera.disparity_quantization", v);
                 }});

    // [filter.sor]
    boolean("filter.sor.enabled", &PipelineConfig::sor_enabled);
    b.push_back({"filter.sor.k",
                 [](const PipelineConfig& c) { return std::to_string(c.sor.k); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.sor.k = static_cast<int>(parse_int("filter.sor.k", v));
                 }});
    b.push_back({"filter.sor.alpha",
                 [](const PipelineConfig& c) { return fmt_num(c.sor.alpha); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.sor.alpha = parse_double("filter.sor.alpha", v);
                 }});

    // [filter.conditional]
    b.push_back({"filter.conditional.box_min",
                 [](const PipelineConfig& c) {
                     if (!c.conditional.spatial_box) return std::string("none");
                     const Vec3& m = c.conditional.spatial_box->min;
                     return fmt_num(m.x()) + " " + fmt_num(m.y()) + " " + fmt_num(m.z());
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     if (v == "none") {
                         c.conditional.spatial_box.reset();
                         return;
                     }
                     if (!c.conditional.spatial_box) c.conditional.spatial_box = Box3{};
                     c.conditional.spatial_box->min =
                         parse_vec3("filter.conditional.box_min", v);
                 }});
    b.push_back({"filter.conditional.box_max",
                 [](const PipelineConfig& c) {
                     if (!c.conditional.spatial_box) return std::string("none");
                     const Vec3& m = c.conditional.spatial_box->max;
                     return fmt_num(m.x()) + " " + fmt_num(m.y()) + " " + fmt_num(m.z());
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     if (v == "none") {
                         c.conditional.spatial_box.reset();
                         return;
                     }
                     if (!c.conditional.spatial_box) c.conditional.spatial_box = Box3{};
                     c.conditional.spatial_box->max =
                         parse_vec3("filter.conditional.box_max", v);
                 }});
    const auto color_binding = [&b](const char* key, bool is_min) {
        b.push_back(
            {key,
             [is_min](const PipelineConfig& c) {
                 if (!c.conditional.color_range) return std::string("none");
                 const Rgb& rgb = is_min ? c.conditional.color_range->min
                                         : c.conditional.color_range->max;
                 return std::to_string(rgb[0]) + " " + std::to_string(rgb[1]) + " " +
                        std::to_string(rgb[2]);
             },
             [is_min, key](PipelineConfig& c, const std::string& v) {
                 if (v == "none") {
                     c.conditional.color_range.reset();
                     return;
                 }
                 std::istringstream in(v);
                 int r, g, bch;
                 if (!(in >> r >> g >> bch) || r < 0 || r > 255 || g < 0 || g > 255 ||
                     bch < 0 || bch > 255)
                     fail(ErrorCode::Config,
                          std::string("config: expected three 0..255 values for '") +
                              key + "'");
                 if (!c.conditional.color_range) c.conditional.color_range = ColorRange{};
                 Rgb& rgb = is_min ? c.conditional.color_range->min
                                   : c.conditional.color_range->max;
                 rgb = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                        static_cast<std::uint8_t>(bch)};
             }});
    };
    color_binding("filter.conditional.color_min", true);
    color_binding("filter.conditional.color_max", false);

    // [filter.mls]
    boolean("filter.mls.enabled", &PipelineConfig::mls_enabled);
    b.push_back({"filter.mls.radius",
                 [](const PipelineConfig& c) { return fmt_num(c.mls.radius); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.mls.radius = parse_double("filter.mls.radius", v);
                 }});
    b.push_back({"filter.mls.polynomial_order",
                 [](const PipelineConfig& c) {
                     return std::to_string(c.mls.polynomial_order);
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     c.mls.polynomial_order =
                         static_cast<int>(parse_int("filter.mls.polynomial_order", v));
                 }});
    b.push_back({"filter.mls.weight_sigma",
                 [](const PipelineConfig& c) { return fmt_num(c.mls.weight_sigma); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.mls.weight_sigma = parse_double("filter.mls.weight_sigma", v);
                 }});

    // [icp]
    boolean("icp.enabled", &PipelineConfig::icp_enabled);
    b.push_back({"icp.max_iterations",
                 [](const PipelineConfig& c) {
                     return std::to_string(c.icp.max_iterations);
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     c.icp.max_iterations =
                         static_cast<int>(parse_int("icp.max_iterations", v));
                 }});
    b.push_back({"icp.convergence_eps",
                 [](const PipelineConfig& c) { return fmt_num(c.icp.convergence_eps); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.icp.convergence_eps = parse_double("icp.convergence_eps", v);
                 }});
    b.push_back({"icp.max_correspondence_distance",
                 [](const PipelineConfig& c) {
                     return fmt_num(c.icp.max_correspondence_distance);
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     c.icp.max_correspondence_distance =
                         parse_double("icp.max_correspondence_distance", v);
                 }});
    b.push_back({"icp.reference_density",
                 [](const PipelineConfig& c) {
                     return fmt_num(c.icp.reference_density);
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     c.icp.reference_density = parse_double("icp.reference_density", v);
                 }});

    // [recon]
    num("recon.voxel_size", &PipelineConfig::recon_voxel_size);
    b.push_back({"recon.max_cells",
                 [](const PipelineConfig& c) { return std::to_string(c.recon_max_cells); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.recon_max_cells =
                         static_cast<std::size_t>(parse_int("recon.max_cells", v));
                 }});
    b.push_back({"recon.normal_k",
                 [](const PipelineConfig& c) { return std::to_string(c.recon_normal_k); },
                 [](PipelineConfig& c, const std::string& v) {
                     c.recon_normal_k =
                         static_cast<int>(parse_int("recon.normal_k", v));
                 }});

    // [metrics]
    num("metrics.pdc_voxel_size", &PipelineConfig::pdc_voxel_size);
    b.push_back({"metrics.heatmap_plane",
                 [](const PipelineConfig& c) {
                     return std::string{"xyz"[c.heatmap_axis_u]} +
                            std::string{"xyz"[c.heatmap_axis_v]};
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     if (v.size() != 2)
                         fail(ErrorCode::Config,
                              "config: metrics.heatmap_plane must be two of x/y/z");
                     const auto axis = [](char ch) {
                         if (ch == 'x') return 0;
                         if (ch == 'y') return 1;
                         if (ch == 'z') return 2;
                         fail(ErrorCode::Config,
                              "config: metrics.heatmap_plane must be two of x/y/z");
                     };
                     c.heatmap_axis_u = axis(v[0]);
                     c.heatmap_axis_v = axis(v[1]);
                     if (c.heatmap_axis_u == c.heatmap_axis_v)
                         fail(ErrorCode::Config,
                              "config: metrics.heatmap_plane axes must differ");
                 }});
    num("metrics.heatmap_cell_size", &PipelineConfig::heatmap_cell_size);

    // [io]
    const auto str = [&b](const char* key, std::string PipelineConfig::* member) {
        b.push_back({key,
                     [member](const PipelineConfig& c) {
                         return (c.*member).empty() ? std::string("none") : c.*member;
                     },
                     [member](PipelineConfig& c, const std::string& v) {
                         c.*member = v == "none" ? std::string() : v;
                     }});
    };
    str("io.input_depth0", &PipelineConfig::input_depth0);
    str("io.input_camera0", &PipelineConfig::input_camera0);
    str("io.input_depth1", &PipelineConfig::input_depth1);
    str("io.input_camera1", &PipelineConfig::input_camera1);
    b.push_back({"io.ply_format",
                 [](const PipelineConfig& c) {
                     return std::string(c.ply_format == PlyFormat::Ascii ? "ascii"
                                                                         : "binary");
                 },
                 [](PipelineConfig& c, const std::string& v) {
                     if (v == "ascii")
                         c.ply_format = PlyFormat::Ascii;
                     else if (v == "binary")
                         c.ply_format = PlyFormat::BinaryLittleEndian;
                     else
                         fail(ErrorCode::Config,
                              "config: io.ply_format must be 'ascii' or 'binary'");
                 }});

    return b;
}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> b = make_bindings();
    return b;
}

const Binding& find_binding(const std::string& key) {
    for (const Binding& b : bindings())
        if (b.key == key) return b;
    fail(ErrorCode::Config, "config: unknown key '" + key + "'");
}

}  // namespace

PipelineConfig default_config() {
    PipelineConfig cfg;
    cfg.ntcr.bend_curvature = 0.004;
    cfg.conditional.spatial_box = Box3{Vec3(-24, -5, -5), Vec3(24, 5, 5)};
    return cfg;
}

void apply_config_override(PipelineConfig& cfg, const std::string& key,
                           const std::string& value) {
    find_binding(trim(key)).set(cfg, trim(value));
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot open config file: " + path);

    PipelineConfig cfg = default_config();
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                fail(ErrorCode::Config, path + ":" + std::to_string(line_no) +
                                            ": malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Config,
                 path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        apply_config_override(cfg, full, value);
    }
    return cfg;
}

std::string dump_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const Binding& b : bindings()) {
        const auto dot = b.key.rfind('.');
        const std::string sec = b.key.substr(0, dot);
        const std::string name = b.key.substr(dot + 1);
        if (sec != section) {
            if (!section.empty()) out << "\n";
            out << "[" << sec << "]\n";
            section = sec;
        }
        out << name << " = " << b.get(cfg) << "\n";
    }
    return out.str();
}

void validate_config(const PipelineConfig& cfg) {
    if (!(cfg.rig_standoff > 0))
        fail(ErrorCode::Config, "config: rig.standoff must be > 0");
    if (cfg.rig_pose_error_deg < 0 || cfg.rig_pose_error_mm < 0)
        fail(ErrorCode::Config, "config: rig pose errors must be >= 0");
    try {
        validate_spec(cfg.ntcr);
        VirtualCamera cam = cfg.camera;
        cam.pose = RigidTransform::identity();
        validate_camera(cam);
        if (cam.intrinsics.cx < 0 || cam.intrinsics.cx > cam.width - 1 ||
            cam.intrinsics.cy < 0 || cam.intrinsics.cy > cam.height - 1)
            fail(ErrorCode::InvalidArgument, "principal point outside image bounds");
        if (cfg.sor.k < 1) fail(ErrorCode::InvalidArgument, "SOR k must be >= 1");
        if (cfg.sor.alpha < 0) fail(ErrorCode::InvalidArgument, "SOR alpha must be >= 0");
        if (cfg.conditional.spatial_box &&
            !(cfg.conditional.spatial_box->min.array() <=
              cfg.conditional.spatial_box->max.array())
                 .all())
            fail(ErrorCode::InvalidArgument, "conditional box min must be <= max");
        if (cfg.conditional.color_range) {
            for (int c = 0; c < 3; ++c)
                if (cfg.conditional.color_range->min[c] > cfg.conditional.color_range->max[c])
                    fail(ErrorCode::InvalidArgument, "conditional color min must be <= max");
        }
        if (!(cfg.mls.radius > 0))
            fail(ErrorCode::InvalidArgument, "MLS radius must be > 0");
        if (!(cfg.mls.weight_sigma > 0))
            fail(ErrorCode::InvalidArgument, "MLS weight_sigma must be > 0");
        if (cfg.mls.polynomial_order != 1 && cfg.mls.polynomial_order != 2)
            fail(ErrorCode::InvalidArgument, "MLS polynomial_order must be 1 or 2");
        if (cfg.icp.max_iterations < 1)
            fail(ErrorCode::InvalidArgument, "ICP max_iterations must be >= 1");
        if (!(cfg.icp.convergence_eps > 0))
            fail(ErrorCode::InvalidArgument, "ICP convergence_eps must be > 0");
        if (!(cfg.icp.max_correspondence_distance > 0))
            fail(ErrorCode::InvalidArgument,
                 "ICP max_correspondence_distance must be > 0");
        if (!(cfg.icp.reference_density > 0))
            fail(ErrorCode::InvalidArgument, "ICP reference_density must be > 0");
        if (!(cfg.recon_voxel_size > 0))
            fail(ErrorCode::InvalidArgument, "recon voxel_size must be > 0");
        if (cfg.recon_normal_k < 3)
            fail(ErrorCode::InvalidArgument, "recon normal_k must be >= 3");
        if (!(cfg.pdc_voxel_size > 0))
            fail(ErrorCode::InvalidArgument, "metrics pdc_voxel_size must be > 0");
        if (!(cfg.heatmap_cell_size > 0))
            fail(ErrorCode::InvalidArgument, "metrics heatmap_cell_size must be > 0");
        const bool any_input = !cfg.input_depth0.empty() || !cfg.input_camera0.empty() ||
                               !cfg.input_depth1.empty() || !cfg.input_camera1.empty();
        const bool all_input = !cfg.input_depth0.empty() && !cfg.input_camera0.empty() &&
                               !cfg.input_depth1.empty() && !cfg.input_camera1.empty();
        if (any_input && !all_input)
            fail(ErrorCode::InvalidArgument,
                 "io: either all four input files must be set or none");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        fail(ErrorCode::Config, std::string("config: ") + e.what());
    }
}

}  // namespace ntcr
