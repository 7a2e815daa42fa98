#include "lodcheck/render.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lodcheck {

namespace {

constexpr double kAlbedo = 0.7;

struct Camera {
    Vec3 eye, right, up, forward; // orthonormal, forward points into the scene
    double half_tan;              // tan(fov/2)
};

Camera make_camera(const Vec3& pivot, const ViewSpec& view) {
    const double yaw = deg_to_rad(view.yaw_deg);
    const double el = deg_to_rad(view.elevation_deg);
    const Vec3 dir{std::cos(el) * std::sin(yaw), std::sin(el), std::cos(el) * std::cos(yaw)};
    Camera cam;
    cam.eye = pivot + dir * view.distance;
    cam.forward = normalized(pivot - cam.eye);
    Vec3 up_hint{0.0, 1.0, 0.0};
    if (std::abs(dot(cam.forward, up_hint)) > 0.999) up_hint = {0.0, 0.0, 1.0};
    cam.right = normalized(cross(cam.forward, up_hint));
    cam.up = cross(cam.right, cam.forward);
    cam.half_tan = std::tan(deg_to_rad(view.fov_deg) * 0.5);
    return cam;
}

struct CamVertex {
    Vec3 p; // camera space: x right, y up, z forward (positive in front)
};

// Sutherland-Hodgman clip of a camera-space triangle against z = near.
// Returns 0..4 vertices.
int clip_near(const CamVertex in[3], double near_z, CamVertex out[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const CamVertex& cur = in[i];
        const CamVertex& nxt = in[(i + 1) % 3];
        const bool cur_in = cur.p.z >= near_z;
        const bool nxt_in = nxt.p.z >= near_z;
        if (cur_in) out[n++] = cur;
        if (cur_in != nxt_in) {
            const double t = (near_z - cur.p.z) / (nxt.p.z - cur.p.z);
            out[n++] = {cur.p + (nxt.p - cur.p) * t};
        }
    }
    return n;
}

} // namespace

void validate_view(const ViewSpec& view) {
    if (!(view.distance > 0.0)) throw std::runtime_error("view: distance must be > 0");
    if (view.resolution < 16) throw std::runtime_error("view: resolution must be >= 16");
    if (!(view.fov_deg > 0.0 && view.fov_deg < 180.0))
        throw std::runtime_error("view: fov must be in (0,180)");
    if (std::abs(length(view.light_dir) - 1.0) > 1e-9)
        throw std::runtime_error("view: light_dir must be unit length");
    if (!(view.ambient >= 0.0 && view.ambient <= 1.0))
        throw std::runtime_error("view: ambient must be in [0,1]");
}

double fit_distance(const Mesh& mesh, double fov_deg, double fill) {
    const double r = bounding_radius(mesh);
    const double half_tan = std::tan(deg_to_rad(fov_deg) * 0.5);
    if (r <= 0.0 || half_tan <= 0.0 || fill <= 0.0) return 1.0;
    return r / (fill * half_tan);
}

namespace {

Image render_at(const Mesh& mesh, const ViewSpec& view, const Vec3& pivot) {
    validate_mesh(mesh);
    validate_view(view);

    const int res = view.resolution;
    Image img = make_image(res, res, view.background[0], view.background[1], view.background[2]);
    std::vector<double> invz_buf(static_cast<std::size_t>(res) * res, 0.0);

    const Camera cam = make_camera(pivot, view);
    const Vec3 light_world = cam.right * view.light_dir.x + cam.up * view.light_dir.y +
                             cam.forward * (-view.light_dir.z);
    // light_dir.z points from the scene toward the camera so that the default
    // (0,0,1) is a headlight; world vector needs the opposite of forward.
    const double near_z = 1e-4 * view.distance;

    for (const Triangle& tri : mesh.triangles) {
        CamVertex cv[3];
        for (int i = 0; i < 3; ++i) {
            const Vec3 rel = mesh.vertices[tri[i]] - cam.eye;
            cv[i].p = {dot(rel, cam.right), dot(rel, cam.up), dot(rel, cam.forward)};
        }
        CamVertex clipped[4];
        const int n = clip_near(cv, near_z, clipped);
        if (n < 3) continue;

        // Flat Lambert shade from the world-space normal, flipped toward the
        // camera so single-sided patches are lit from either side.
        Vec3 normal = triangle_normal(mesh, tri);
        if (length(normal) == 0.0) continue;
        const Vec3 to_eye = cam.eye - mesh.vertices[tri[0]];
        if (dot(normal, to_eye) < 0.0) normal = -normal;
        const double lambert = std::max(0.0, dot(normal, light_world));
        const double shade = std::min(1.0, std::max(0.0, view.ambient + kAlbedo * lambert));
        const float value = static_cast<float>(shade);

        for (int t = 1; t + 1 < n; ++t) {
            const Vec3 pts[3] = {clipped[0].p, clipped[t].p, clipped[t + 1].p};
            double sx[3], sy[3];
            double invz[3];
            for (int i = 0; i < 3; ++i) {
                const double inv = 1.0 / (pts[i].z * cam.half_tan);
                sx[i] = (pts[i].x * inv * 0.5 + 0.5) * res;
                sy[i] = (0.5 - pts[i].y * inv * 0.5) * res;
                invz[i] = 1.0 / pts[i].z;
            }
            const double area = (sx[1] - sx[0]) * (sy[2] - sy[0]) - (sx[2] - sx[0]) * (sy[1] - sy[0]);
            if (area == 0.0) continue;
            const double inv_area = 1.0 / area;

            const int x0 = std::max(0, static_cast<int>(std::floor(std::min({sx[0], sx[1], sx[2]}))));
            const int x1 = std::min(res - 1, static_cast<int>(std::ceil(std::max({sx[0], sx[1], sx[2]}))));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min({sy[0], sy[1], sy[2]}))));
            const int y1 = std::min(res - 1, static_cast<int>(std::ceil(std::max({sy[0], sy[1], sy[2]}))));

            for (int py = y0; py <= y1; ++py) {
                const double cy = py + 0.5;
                for (int px = x0; px <= x1; ++px) {
                    const double cx = px + 0.5;
                    const double w0 = ((sx[1] - cx) * (sy[2] - cy) - (sx[2] - cx) * (sy[1] - cy)) * inv_area;
                    const double w1 = ((sx[2] - cx) * (sy[0] - cy) - (sx[0] - cx) * (sy[2] - cy)) * inv_area;
                    const double w2 = 1.0 - w0 - w1;
                    if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                    const double pixel_invz = w0 * invz[0] + w1 * invz[1] + w2 * invz[2];
                    double& stored = invz_buf[static_cast<std::size_t>(py) * res + px];
                    if (pixel_invz > stored) {
                        stored = pixel_invz;
                        float* px_data = &img.at(px, py, 0);
                        px_data[0] = value;
                        px_data[1] = value;
                        px_data[2] = value;
                    }
                }
            }
        }
    }
    return img;
}

} // namespace

Image render(const Mesh& mesh, const ViewSpec& view) {
    return render_at(mesh, view, mesh_bounds(mesh).center());
}

std::pair<Image, Image> render_pair(const Mesh& reference, const Mesh& candidate,
                                    const ViewSpec& view, double zoom_factor) {
    if (!(zoom_factor > 1.0))
        throw std::runtime_error("render_pair: zoom_factor must be > 1");
    const Vec3 pivot = mesh_bounds(reference).center();
    ViewSpec zoomed = view;
    zoomed.distance = view.distance * zoom_factor;
    return {render_at(reference, view, pivot), render_at(candidate, zoomed, pivot)};
}

} // namespace lodcheck
