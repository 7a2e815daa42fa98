#pragma once

#include <cstdint>

#include "lodcheck/mesh.hpp"
#include "lodcheck/quadric.hpp"

namespace lodcheck {

/// Area-weighted sum of plane quadrics over the triangles incident to
/// `vertex`. Isolated vertices yield the zero quadric. Boundary penalties
/// are not included here; decimate() adds them internally.
Quadric quadric_of_vertex(const Mesh& mesh, std::uint32_t vertex);

/// Reduce `mesh` to at most `target_vertices` vertices by iterative
/// minimum-cost edge collapse under vertex quadrics.
///
/// - min-heap on collapse cost, ties broken by vertex index pair
/// - boundary edges are pinned by perpendicular penalty planes
/// - collapses that would flip a surviving triangle's normal are
///   re-queued once at a penalized cost, then dropped
/// - stops at the target or when no legal collapse remains
///
/// Targets >= the current vertex count are a no-op. Throws for targets < 3.
/// Output is deterministic for identical inputs.
Mesh decimate(const Mesh& mesh, std::uint32_t target_vertices);

} // namespace lodcheck
