// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// PLY reader/writer (ASCII and binary little-endian). Vertex positions are
// 32-bit floats, colors 8-bit unsigned, normals 32-bit floats. The cloud's
// frame label rides in a "comment frame <label>" header line. Unknown
// properties and elements are skipped with a warning.

#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"

namespace ntcr {

enum class PlyFormat { Ascii, BinaryLittleEndian };

struct PlyReadResult {
    PointCloud cloud;
    std::vector<std::string> warnings;
};

void write_ply(const std::string& path, const PointCloud& cloud,
               PlyFormat format = PlyFormat::BinaryLittleEndian);

void write_ply(const std::string& path, const TriangleMesh& mesh,
               PlyFormat format = PlyFormat::BinaryLittleEndian);

PlyReadResult read_ply_cloud(const std::string& path);

TriangleMesh read_ply_mesh(const std::string& path);

// Wavefront OBJ export (vertices + triangular faces).
void write_obj(const std::string& path, const TriangleMesh& mesh);

}  // namespace ntcr
