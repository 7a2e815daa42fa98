#pragma once

#include <array>
#include <utility>

#include "lodcheck/image.hpp"
#include "lodcheck/mesh.hpp"

namespace lodcheck {

/// Orbit camera + lighting + framing for one deterministic render.
///
/// The camera sits at spherical coordinates (distance, yaw, elevation)
/// around the mesh's bounding-box center and looks at it. light_dir is a
/// unit vector in camera space (x = right, y = up, z = forward), so a view
/// rotated together with the mesh shades identically.
struct ViewSpec {
    double distance = 3.0;
    double yaw_deg = 0.0;
    double elevation_deg = 0.0;
    Vec3 light_dir{0.0, 0.0, 1.0};
    double ambient = 0.25;
    std::array<float, 3> background{0.1f, 0.1f, 0.12f};
    int resolution = 224;
    double fov_deg = 40.0;
};

/// Throws if distance <= 0, resolution < 16, fov outside (0,180),
/// |light_dir| != 1 within 1e-9, or ambient outside [0,1].
void validate_view(const ViewSpec& view);

/// Distance at which the mesh's bounding sphere spans `fill` of the frame
/// height under the given vertical field of view.
double fit_distance(const Mesh& mesh, double fov_deg, double fill = 0.6);

/// Perspective projection, z-buffered triangle fill, flat Lambert shading
/// (ambient + 0.7 * max(0, n.l), gray albedo) over a solid background.
/// Pure function of (mesh, view): identical inputs give identical pixels.
Image render(const Mesh& mesh, const ViewSpec& view);

/// Reference rendered at view.distance, candidate at view.distance *
/// zoom_factor; everything else (pivot, lighting, background) identical.
/// Both renders orbit the reference mesh's bounding-box center so that a
/// pair differs only by geometry and apparent size. zoom_factor must be > 1.
std::pair<Image, Image> render_pair(const Mesh& reference, const Mesh& candidate,
                                    const ViewSpec& view, double zoom_factor);

} // namespace lodcheck
