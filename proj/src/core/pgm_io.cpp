// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgm_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"

namespace ntcr {

namespace {

constexpr double kDepthUnit = 0.01;  // mm per PGM step

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_depth_pgm(const std::string& path, const DepthMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    out << "P5\n" << map.width << " " << map.height << "\n65535\n";
    for (const double d : map.depth) {
        std::uint16_t v = 0;
        if (depth_valid(d)) {
            const double units = std::round(d / kDepthUnit);
            v = static_cast<std::uint16_t>(std::min(units, 65535.0));
            if (v == 0) v = 1;  // live depth must not collide with the marker
        }
        // PGM stores the most significant byte first.
        const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                        static_cast<unsigned char>(v & 0xff)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

PgmImage read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") fail(ErrorCode::Io, "not a binary PGM: " + path);
    int width = 0, height = 0, maxval = 0;
    in >> width >> height >> maxval;
    if (width <= 0 || height <= 0 || maxval != 65535)
        fail(ErrorCode::Io, "unsupported PGM header in " + path);
    in.get();  // single whitespace after maxval

    PgmImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    for (auto& px : img.pixels) {
        unsigned char bytes[2];
        in.read(reinterpret_cast<char*>(bytes), 2);
        px = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
    }
    if (!in) fail(ErrorCode::Io, "truncated PGM: " + path);
    return img;
}

void write_pgm8(const std::string& path, int width, int height,
                const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        fail(ErrorCode::InvalidArgument, "pixel buffer size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

void write_camera_meta(const std::string& path, const DepthMap& map) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    out << "# depth camera metadata\n";
    out << "width = " << map.width << "\n";
    out << "height = " << map.height << "\n";
    out << "fx = " << fmt_full(map.intrinsics.fx) << "\n";
    out << "fy = " << fmt_full(map.intrinsics.fy) << "\n";
    out << "cx = " << fmt_full(map.intrinsics.cx) << "\n";
    out << "cy = " << fmt_full(map.intrinsics.cy) << "\n";
    out << "frame = " << map.base_frame << "\n";
    out << "pose_r =";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ' ' << fmt_full(map.camera_pose.rotation(r, c));
    out << "\npose_t =";
    for (int r = 0; r < 3; ++r) out << ' ' << fmt_full(map.camera_pose.translation[r]);
    out << "\n";
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

DepthMap read_depth_map(const std::string& pgm_path, const std::string& meta_path) {
    std::ifstream in(meta_path);
    if (!in) fail(ErrorCode::Io, "cannot open: " + meta_path);

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto need = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end())
            fail(ErrorCode::Io, "camera metadata missing key '" + key + "' in " + meta_path);
        return it->second;
    };

    DepthMap map;
    map.width = std::stoi(need("width"));
    map.height = std::stoi(need("height"));
    map.intrinsics.fx = std::stod(need("fx"));
    map.intrinsics.fy = std::stod(need("fy"));
    map.intrinsics.cx = std::stod(need("cx"));
    map.intrinsics.cy = std::stod(need("cy"));
    map.base_frame = need("frame");
    {
        std::istringstream rs(need("pose_r"));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                if (!(rs >> map.camera_pose.rotation(r, c)))
                    fail(ErrorCode::Io, "bad pose_r in " + meta_path);
        std::istringstream ts(need("pose_t"));
        for (int r = 0; r < 3; ++r)
            if (!(ts >> map.camera_pose.translation[r]))
                fail(ErrorCode::Io, "bad pose_t in " + meta_path);
    }

    const PgmImage img = read_pgm16(pgm_path);
    if (img.width != map.width || img.height != map.height)
        fail(ErrorCode::Io, "PGM dimensions disagree with metadata for " + pgm_path);
    map.depth.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        map.depth[i] = img.pixels[i] == 0 ? kInvalidDepth : img.pixels[i] * kDepthUnit;

    validate_depth_map(map);
    return map;
}

}  // namespace ntcr
