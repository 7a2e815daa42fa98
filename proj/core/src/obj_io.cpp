#include "lodcheck/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lodcheck {

void validate_mesh(const Mesh& mesh) {
    if (mesh.vertices.size() < 3)
        throw std::runtime_error("mesh '" + mesh.name + "': fewer than 3 vertices");
    if (mesh.triangles.empty())
        throw std::runtime_error("mesh '" + mesh.name + "': no triangles");
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.vertices.size());
    for (const Triangle& t : mesh.triangles) {
        if (t[0] >= n || t[1] >= n || t[2] >= n)
            throw std::runtime_error("mesh '" + mesh.name + "': triangle index out of range");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw std::runtime_error("mesh '" + mesh.name + "': triangle repeats a vertex");
    }
}

Aabb mesh_bounds(const Mesh& mesh) {
    Aabb box;
    for (const Vec3& v : mesh.vertices) box.expand(v);
    return box;
}

double bounding_radius(const Mesh& mesh) {
    Aabb box = mesh_bounds(mesh);
    if (!box.valid()) return 0.0;
    Vec3 c = box.center();
    double r2 = 0.0;
    for (const Vec3& v : mesh.vertices) r2 = std::max(r2, dot(v - c, v - c));
    return std::sqrt(r2);
}

Vec3 triangle_normal(const Mesh& mesh, const Triangle& tri) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    return normalized(cross(b - a, c - a));
}

double triangle_area(const Mesh& mesh, const Triangle& tri) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    return 0.5 * length(cross(b - a, c - a));
}

Mesh rotated_about_y(const Mesh& mesh, double degrees) {
    Mesh out = mesh;
    const Vec3 c = mesh_bounds(mesh).center();
    const double s = std::sin(deg_to_rad(degrees));
    const double co = std::cos(deg_to_rad(degrees));
    for (Vec3& v : out.vertices) {
        const Vec3 p = v - c;
        v = Vec3{co * p.x + s * p.z, p.y, -s * p.x + co * p.z} + c;
    }
    return out;
}

namespace {

// Resolves an OBJ face index (1-based, negative = relative) to 0-based.
std::uint32_t resolve_index(long idx, std::size_t vertex_count, const std::string& path) {
    if (idx == 0)
        throw std::runtime_error(path + ": face index 0 is invalid (OBJ indices are 1-based)");
    long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count))
        throw std::runtime_error(path + ": face index " + std::to_string(idx) + " out of range");
    return static_cast<std::uint32_t>(resolved);
}

} // namespace

Mesh load_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OBJ file: " + path.string());

    Mesh mesh;
    mesh.name = path.stem().string();
    const std::string pstr = path.string();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw std::runtime_error(pstr + ":" + std::to_string(line_no) + ": malformed vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::uint32_t> corners;
            std::string vert;
            while (ls >> vert) {
                // Accept i, i/j, i//k, i/j/k; only the position index matters.
                std::size_t pos = 0;
                long idx = 0;
                try {
                    idx = std::stol(vert, &pos);
                } catch (const std::exception&) {
                    throw std::runtime_error(pstr + ":" + std::to_string(line_no) + ": malformed face index '" + vert + "'");
                }
                if (pos == 0 || (pos < vert.size() && vert[pos] != '/'))
                    throw std::runtime_error(pstr + ":" + std::to_string(line_no) + ": malformed face index '" + vert + "'");
                corners.push_back(resolve_index(idx, mesh.vertices.size(), pstr));
            }
            if (corners.size() < 3)
                throw std::runtime_error(pstr + ":" + std::to_string(line_no) + ": face with fewer than 3 vertices");
            for (std::size_t i = 1; i + 1 < corners.size(); ++i)
                mesh.triangles.push_back({corners[0], corners[i], corners[i + 1]});
        }
        // Everything else (vn, vt, usemtl, o, g, s, comments) is ignored.
    }
    if (mesh.vertices.empty())
        throw std::runtime_error(pstr + ": no vertices in file");
    validate_mesh(mesh);
    return mesh;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    std::fprintf(f, "# %zu vertices, %zu triangles\n", mesh.vertices.size(), mesh.triangles.size());
    for (const Vec3& v : mesh.vertices)
        std::fprintf(f, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    for (const Triangle& t : mesh.triangles) {
        const Vec3 n = triangle_normal(mesh, t);
        std::fprintf(f, "vn %.9g %.9g %.9g\n", n.x, n.y, n.z);
    }
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const Triangle& t = mesh.triangles[i];
        std::fprintf(f, "f %u//%zu %u//%zu %u//%zu\n",
                     t[0] + 1, i + 1, t[1] + 1, i + 1, t[2] + 1, i + 1);
    }
    if (std::fclose(f) != 0)
        throw std::runtime_error("write failed: " + path.string());
}

} // namespace lodcheck
