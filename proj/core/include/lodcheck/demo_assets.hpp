#pragma once

#include <cstdint>
#include <vector>

#include "lodcheck/mesh.hpp"

namespace lodcheck {

// Procedural primitives so the whole pipeline can run without any external
// asset library. Generators are deterministic in their arguments.

Mesh make_icosphere(int subdivisions, double radius = 1.0);
Mesh make_uv_sphere(int segments, int rings, double radius = 1.0);
Mesh make_box(int segments_per_edge, double half_extent = 1.0);
Mesh make_cylinder(int radial_segments, int height_segments,
                   double radius = 1.0, double half_height = 1.0);

/// Lumpy blob: icosphere warped by a seeded sum of low-frequency radial
/// waves plus a mild anisotropic scale.
Mesh make_rock(std::uint64_t seed, int subdivisions);

/// A mixed set of named assets (rocks, boxes, cylinders, spheres) in three
/// size tiers. Deterministic in (count, seed); names are unique.
std::vector<Mesh> make_demo_set(int count, std::uint64_t seed);

} // namespace lodcheck
