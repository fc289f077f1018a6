// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#include "ply_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

namespace ntcr {

namespace {

enum class ScalarType { U8, I8, U16, I16, U32, I32, F32, F64 };

std::size_t scalar_size(ScalarType t) {
    switch (t) {
        case ScalarType::U8:
        case ScalarType::I8:
            return 1;
        case ScalarType::U16:
        case ScalarType::I16:
            return 2;
        case ScalarType::U32:
        case ScalarType::I32:
        case ScalarType::F32:
            return 4;
        case ScalarType::F64:
            return 8;
    }
    return 0;
}

ScalarType parse_scalar_type(const std::string& s) {
    if (s == "uchar" || s == "uint8") return ScalarType::U8;
    if (s == "char" || s == "int8") return ScalarType::I8;
    if (s == "ushort" || s == "uint16") return ScalarType::U16;
    if (s == "short" || s == "int16") return ScalarType::I16;
    if (s == "uint" || s == "uint32") return ScalarType::U32;
    if (s == "int" || s == "int32") return ScalarType::I32;
    if (s == "float" || s == "float32") return ScalarType::F32;
    if (s == "double" || s == "float64") return ScalarType::F64;
    fail(ErrorCode::Io, "PLY: unknown property type '" + s + "'");
}

struct Property {
    std::string name;
    ScalarType type = ScalarType::F32;
    bool is_list = false;
    ScalarType count_type = ScalarType::U8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
};

struct Header {
    PlyFormat format = PlyFormat::Ascii;
    std::vector<Element> elements;
    std::string frame;
    std::size_t body_offset = 0;  // bytes from file start to first body byte
};

Header parse_header(std::istream& in, const std::string& path) {
    Header header;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::Io, "PLY: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ply") fail(ErrorCode::Io, "PLY: missing magic in " + path);

    bool format_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        if (keyword == "end_header") {
            if (!format_seen) fail(ErrorCode::Io, "PLY: missing format line in " + path);
            header.body_offset = static_cast<std::size_t>(in.tellg());
            return header;
        }
        if (keyword == "format") {
            std::string fmt, version;
            ls >> fmt >> version;
            if (fmt == "ascii") {
                header.format = PlyFormat::Ascii;
            } else if (fmt == "binary_little_endian") {
                header.format = PlyFormat::BinaryLittleEndian;
            } else {
                fail(ErrorCode::Io, "PLY: unsupported format '" + fmt + "' in " + path);
            }
            format_seen = true;
        } else if (keyword == "comment" || keyword == "obj_info") {
            std::string tag;
            ls >> tag;
            if (tag == "frame") {
                std::string label;
                ls >> label;
                header.frame = label;
            }
        } else if (keyword == "element") {
            Element e;
            ls >> e.name >> e.count;
            header.elements.push_back(e);
        } else if (keyword == "property") {
            if (header.elements.empty())
                fail(ErrorCode::Io, "PLY: property before element in " + path);
            Property p;
            std::string t;
            ls >> t;
            if (t == "list") {
                std::string count_t, item_t;
                ls >> count_t >> item_t >> p.name;
                p.is_list = true;
                p.count_type = parse_scalar_type(count_t);
                p.type = parse_scalar_type(item_t);
            } else {
                ls >> p.name;
                p.type = parse_scalar_type(t);
            }
            header.elements.back().properties.push_back(p);
        }
    }
    fail(ErrorCode::Io, "PLY: unterminated header in " + path);
}

double read_binary_scalar(std::istream& in, ScalarType t) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(scalar_size(t)));
    switch (t) {
        case ScalarType::U8:
            return buf[0];
        case ScalarType::I8:
            return static_cast<std::int8_t>(buf[0]);
        case ScalarType::U16: {
            std::uint16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        case ScalarType::I16: {
            std::int16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        case ScalarType::U32: {
            std::uint32_t v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case ScalarType::I32: {
            std::int32_t v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case ScalarType::F32: {
            float v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case ScalarType::F64: {
            double v;
            std::memcpy(&v, buf, 8);
            return v;
        }
    }
    return 0.0;
}

double read_ascii_scalar(std::istream& in) {
    double v;
    if (!(in >> v)) fail(ErrorCode::Io, "PLY: truncated ASCII body");
    return v;
}

// Generic body walker: calls on_value(element_idx, row, property_idx, value)
// for scalar properties and on_list for list properties.
template <typename OnValue, typename OnList>
void walk_body(std::istream& in, const Header& header, OnValue&& on_value,
               OnList&& on_list) {
    const bool binary = header.format == PlyFormat::BinaryLittleEndian;
    for (std::size_t e = 0; e < header.elements.size(); ++e) {
        const Element& elem = header.elements[e];
        for (std::size_t row = 0; row < elem.count; ++row) {
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                const Property& prop = elem.properties[p];
                if (prop.is_list) {
                    const double n = binary ? read_binary_scalar(in, prop.count_type)
                                            : read_ascii_scalar(in);
                    std::vector<double> items(static_cast<std::size_t>(n));
                    for (double& item : items)
                        item = binary ? read_binary_scalar(in, prop.type)
                                      : read_ascii_scalar(in);
                    on_list(e, row, p, items);
                } else {
                    const double v = binary ? read_binary_scalar(in, prop.type)
                                            : read_ascii_scalar(in);
                    on_value(e, row, p, v);
                }
            }
            if (in.fail()) fail(ErrorCode::Io, "PLY: truncated body");
        }
    }
}

void write_f32(std::ostream& out, double v) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), 4);
}

// Shortest representation that round-trips a float32.
std::string fmt_f32(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(static_cast<float>(v)));
    return buf;
}

void write_vertex_header(std::ostream& out, const PointCloud& cloud) {
    out << "element vertex " << cloud.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (cloud.has_normals())
        out << "property float nx\nproperty float ny\nproperty float nz\n";
    if (cloud.has_colors())
        out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
}

}  // namespace

void write_ply(const std::string& path, const PointCloud& cloud, PlyFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);

    out << "ply\n";
    out << (format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                       : "format binary_little_endian 1.0\n");
    if (!cloud.frame.empty()) out << "comment frame " << cloud.frame << "\n";
    write_vertex_header(out, cloud);
    out << "end_header\n";

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (format == PlyFormat::Ascii) {
            out << fmt_f32(cloud.points[i].x()) << ' ' << fmt_f32(cloud.points[i].y())
                << ' ' << fmt_f32(cloud.points[i].z());
            if (cloud.has_normals())
                out << ' ' << fmt_f32(cloud.normals[i].x()) << ' '
                    << fmt_f32(cloud.normals[i].y()) << ' '
                    << fmt_f32(cloud.normals[i].z());
            if (cloud.has_colors())
                out << ' ' << static_cast<int>(cloud.colors[i][0]) << ' '
                    << static_cast<int>(cloud.colors[i][1]) << ' '
                    << static_cast<int>(cloud.colors[i][2]);
            out << '\n';
        } else {
            write_f32(out, cloud.points[i].x());
            write_f32(out, cloud.points[i].y());
            write_f32(out, cloud.points[i].z());
            if (cloud.has_normals()) {
                write_f32(out, cloud.normals[i].x());
                write_f32(out, cloud.normals[i].y());
                write_f32(out, cloud.normals[i].z());
            }
            if (cloud.has_colors())
                out.write(reinterpret_cast<const char*>(cloud.colors[i].data()), 3);
        }
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

void write_ply(const std::string& path, const TriangleMesh& mesh, PlyFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);

    out << "ply\n";
    out << (format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                       : "format binary_little_endian 1.0\n");
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";

    for (const Vec3& v : mesh.vertices) {
        if (format == PlyFormat::Ascii) {
            out << fmt_f32(v.x()) << ' ' << fmt_f32(v.y()) << ' ' << fmt_f32(v.z())
                << '\n';
        } else {
            write_f32(out, v.x());
            write_f32(out, v.y());
            write_f32(out, v.z());
        }
    }
    for (const auto& tri : mesh.triangles) {
        if (format == PlyFormat::Ascii) {
            out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
        } else {
            const std::uint8_t n = 3;
            out.write(reinterpret_cast<const char*>(&n), 1);
            for (const std::uint32_t idx : tri) {
                const std::int32_t v = static_cast<std::int32_t>(idx);
                out.write(reinterpret_cast<const char*>(&v), 4);
            }
        }
    }
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

PlyReadResult read_ply_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open: " + path);
    const Header header = parse_header(in, path);

    PlyReadResult result;
    result.cloud.frame = header.frame;

    // Map known vertex property names; everything else is skipped.
    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
    int ir = -1, ig = -1, ib = -1;
    const Element* vertex = nullptr;
    std::size_t vertex_elem_idx = 0;
    for (std::size_t e = 0; e < header.elements.size(); ++e) {
        const Element& elem = header.elements[e];
        if (elem.name == "vertex") {
            vertex = &elem;
            vertex_elem_idx = e;
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                const std::string& n = elem.properties[p].name;
                if (elem.properties[p].is_list) {
                    result.warnings.push_back("skipping list property 'vertex." + n + "'");
                    continue;
                }
                if (n == "x") ix = static_cast<int>(p);
                else if (n == "y") iy = static_cast<int>(p);
                else if (n == "z") iz = static_cast<int>(p);
                else if (n == "nx") inx = static_cast<int>(p);
                else if (n == "ny") iny = static_cast<int>(p);
                else if (n == "nz") inz = static_cast<int>(p);
                else if (n == "red") ir = static_cast<int>(p);
                else if (n == "green") ig = static_cast<int>(p);
                else if (n == "blue") ib = static_cast<int>(p);
                else
                    result.warnings.push_back("skipping unknown property 'vertex." + n + "'");
            }
        } else {
            result.warnings.push_back("skipping element '" + elem.name + "'");
        }
    }
    if (vertex == nullptr) fail(ErrorCode::Io, "PLY: no vertex element in " + path);
    if (ix < 0 || iy < 0 || iz < 0)
        fail(ErrorCode::Io, "PLY: vertex element lacks x/y/z in " + path);

    const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;
    const bool has_colors = ir >= 0 && ig >= 0 && ib >= 0;
    result.cloud.points.assign(vertex->count, Vec3::Zero());
    if (has_normals) result.cloud.normals.assign(vertex->count, Vec3::Zero());
    if (has_colors) result.cloud.colors.assign(vertex->count, Rgb{0, 0, 0});

    walk_body(
        in, header,
        [&](std::size_t e, std::size_t row, std::size_t p, double v) {
            if (e != vertex_elem_idx) return;
            const int pi = static_cast<int>(p);
            if (pi == ix) result.cloud.points[row].x() = v;
            else if (pi == iy) result.cloud.points[row].y() = v;
            else if (pi == iz) result.cloud.points[row].z() = v;
            else if (pi == inx) result.cloud.normals[row].x() = v;
            else if (pi == iny) result.cloud.normals[row].y() = v;
            else if (pi == inz) result.cloud.normals[row].z() = v;
            else if (pi == ir) result.cloud.colors[row][0] = static_cast<std::uint8_t>(v);
            else if (pi == ig) result.cloud.colors[row][1] = static_cast<std::uint8_t>(v);
            else if (pi == ib) result.cloud.colors[row][2] = static_cast<std::uint8_t>(v);
        },
        [](std::size_t, std::size_t, std::size_t, const std::vector<double>&) {});

    return result;
}

TriangleMesh read_ply_mesh(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open: " + path);
    const Header header = parse_header(in, path);

    TriangleMesh mesh;
    std::size_t vertex_elem = static_cast<std::size_t>(-1);
    std::size_t face_elem = static_cast<std::size_t>(-1);
    int ix = -1, iy = -1, iz = -1, ilist = -1;
    for (std::size_t e = 0; e < header.elements.size(); ++e) {
        const Element& elem = header.elements[e];
        if (elem.name == "vertex") {
            vertex_elem = e;
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                const std::string& n = elem.properties[p].name;
                if (n == "x") ix = static_cast<int>(p);
                else if (n == "y") iy = static_cast<int>(p);
                else if (n == "z") iz = static_cast<int>(p);
            }
            mesh.vertices.assign(elem.count, Vec3::Zero());
        } else if (elem.name == "face") {
            face_elem = e;
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                const std::string& n = elem.properties[p].name;
                if (elem.properties[p].is_list &&
                    (n == "vertex_indices" || n == "vertex_index"))
                    ilist = static_cast<int>(p);
            }
            mesh.triangles.reserve(elem.count);
        }
    }
    if (vertex_elem == static_cast<std::size_t>(-1) || ix < 0 || iy < 0 || iz < 0)
        fail(ErrorCode::Io, "PLY: no vertex x/y/z in " + path);
    if (face_elem == static_cast<std::size_t>(-1) || ilist < 0)
        fail(ErrorCode::Io, "PLY: no face vertex_indices in " + path);

    walk_body(
        in, header,
        [&](std::size_t e, std::size_t row, std::size_t p, double v) {
            if (e != vertex_elem) return;
            const int pi = static_cast<int>(p);
            if (pi == ix) mesh.vertices[row].x() = v;
            else if (pi == iy) mesh.vertices[row].y() = v;
            else if (pi == iz) mesh.vertices[row].z() = v;
        },
        [&](std::size_t e, std::size_t, std::size_t p, const std::vector<double>& items) {
            if (e != face_elem || static_cast<int>(p) != ilist) return;
            if (items.size() != 3)
                fail(ErrorCode::Io, "PLY: non-triangular face in " + path);
            mesh.triangles.push_back({static_cast<std::uint32_t>(items[0]),
                                      static_cast<std::uint32_t>(items[1]),
                                      static_cast<std::uint32_t>(items[2])});
        });

    return mesh;
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace ntcr
