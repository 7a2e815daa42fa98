#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lodcheck/geom.hpp"

namespace lodcheck {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh with positions only; the unit of LOD reduction.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string name;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
};

/// Throws std::runtime_error if any triangle index is out of range, a
/// triangle repeats a vertex, or the mesh is too small to render
/// (fewer than 3 vertices or no triangles).
void validate_mesh(const Mesh& mesh);

Aabb mesh_bounds(const Mesh& mesh);

/// Radius of the bounding sphere centered at the bounding-box center.
double bounding_radius(const Mesh& mesh);

/// Unit normal of a triangle; zero vector for degenerate triangles.
Vec3 triangle_normal(const Mesh& mesh, const Triangle& tri);

double triangle_area(const Mesh& mesh, const Triangle& tri);

/// Rotate all vertices about the vertical (Y) axis through the bounding-box
/// center. Used by tests and view-consistency checks.
Mesh rotated_about_y(const Mesh& mesh, double degrees);

/// Load a Wavefront OBJ triangle mesh. Polygonal faces are fan-triangulated,
/// normals/texcoords are ignored. Throws on I/O failure, malformed or
/// out-of-range face indices, and files with no vertices.
Mesh load_obj(const std::filesystem::path& path);

/// Write vertices and faces as ASCII OBJ with per-face normals recomputed.
/// Output is byte-deterministic for identical meshes.
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

} // namespace lodcheck
