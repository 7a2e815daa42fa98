#include "lodcheck/demo_assets.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "lodcheck/rng.hpp"

namespace lodcheck {

namespace {

using std::numbers::pi;

std::uint32_t midpoint(std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t>& cache,
                       Mesh& mesh, std::uint32_t a, std::uint32_t b) {
    const auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Vec3 mid = normalized((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
    const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(mid);
    cache.emplace(key, idx);
    return idx;
}

} // namespace

Mesh make_icosphere(int subdivisions, double radius) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh mesh;
    mesh.name = "icosphere";
    mesh.vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (Vec3& v : mesh.vertices) v = normalized(v);
    mesh.triangles = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> cache;
        std::vector<Triangle> next;
        next.reserve(mesh.triangles.size() * 4);
        for (const Triangle& tri : mesh.triangles) {
            const std::uint32_t ab = midpoint(cache, mesh, tri[0], tri[1]);
            const std::uint32_t bc = midpoint(cache, mesh, tri[1], tri[2]);
            const std::uint32_t ca = midpoint(cache, mesh, tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        mesh.triangles = std::move(next);
    }
    for (Vec3& v : mesh.vertices) v = v * radius;
    return mesh;
}

Mesh make_uv_sphere(int segments, int rings, double radius) {
    Mesh mesh;
    mesh.name = "uvsphere";
    mesh.vertices.push_back({0, radius, 0});
    for (int r = 1; r < rings; ++r) {
        const double theta = pi * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * pi * s / segments;
            mesh.vertices.push_back({radius * std::sin(theta) * std::cos(phi),
                                     radius * std::cos(theta),
                                     radius * std::sin(theta) * std::sin(phi)});
        }
    }
    mesh.vertices.push_back({0, -radius, 0});
    const auto bottom = static_cast<std::uint32_t>(mesh.vertices.size() - 1);

    auto ring_vertex = [segments](int r, int s) {
        return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
    };
    for (int s = 0; s < segments; ++s)
        mesh.triangles.push_back({0, ring_vertex(1, s + 1), ring_vertex(1, s)});
    for (int r = 1; r < rings - 1; ++r)
        for (int s = 0; s < segments; ++s) {
            const std::uint32_t a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
            const std::uint32_t c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
            mesh.triangles.push_back({a, b, d});
            mesh.triangles.push_back({a, d, c});
        }
    for (int s = 0; s < segments; ++s)
        mesh.triangles.push_back({bottom, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1)});
    return mesh;
}

Mesh make_box(int segments_per_edge, double half_extent) {
    const int n = std::max(1, segments_per_edge);
    Mesh mesh;
    mesh.name = "box";
    std::map<std::array<int, 3>, std::uint32_t> lattice;
    auto vertex_at = [&](int i, int j, int k) {
        const std::array<int, 3> key{i, j, k};
        auto it = lattice.find(key);
        if (it != lattice.end()) return it->second;
        const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back({half_extent * (2.0 * i / n - 1.0),
                                 half_extent * (2.0 * j / n - 1.0),
                                 half_extent * (2.0 * k / n - 1.0)});
        lattice.emplace(key, idx);
        return idx;
    };
    // Each face is a welded (n+1)^2 grid; `flip` orients normals outward.
    auto emit_face = [&](auto&& corner, bool flip) {
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                auto [a0, a1, a2] = corner(u, v);
                const std::uint32_t a = vertex_at(a0, a1, a2);
                auto [b0, b1, b2] = corner(u + 1, v);
                const std::uint32_t b = vertex_at(b0, b1, b2);
                auto [c0, c1, c2] = corner(u + 1, v + 1);
                const std::uint32_t c = vertex_at(c0, c1, c2);
                auto [d0, d1, d2] = corner(u, v + 1);
                const std::uint32_t d = vertex_at(d0, d1, d2);
                if (flip) {
                    mesh.triangles.push_back({a, c, b});
                    mesh.triangles.push_back({a, d, c});
                } else {
                    mesh.triangles.push_back({a, b, c});
                    mesh.triangles.push_back({a, c, d});
                }
            }
    };
    emit_face([n](int u, int v) { return std::array{u, v, 0}; }, false);
    emit_face([n](int u, int v) { return std::array{u, v, n}; }, true);
    emit_face([n](int u, int v) { return std::array{u, 0, v}; }, true);
    emit_face([n](int u, int v) { return std::array{u, n, v}; }, false);
    emit_face([n](int u, int v) { return std::array{0, u, v}; }, false);
    emit_face([n](int u, int v) { return std::array{n, u, v}; }, true);
    return mesh;
}

Mesh make_cylinder(int radial_segments, int height_segments, double radius, double half_height) {
    Mesh mesh;
    mesh.name = "cylinder";
    for (int h = 0; h <= height_segments; ++h) {
        const double y = half_height * (2.0 * h / height_segments - 1.0);
        for (int s = 0; s < radial_segments; ++s) {
            const double phi = 2.0 * pi * s / radial_segments;
            mesh.vertices.push_back({radius * std::cos(phi), y, radius * std::sin(phi)});
        }
    }
    const auto top_center = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back({0, half_height, 0});
    const auto bottom_center = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back({0, -half_height, 0});

    auto ring_vertex = [radial_segments](int h, int s) {
        return static_cast<std::uint32_t>(h * radial_segments + (s % radial_segments));
    };
    for (int h = 0; h < height_segments; ++h)
        for (int s = 0; s < radial_segments; ++s) {
            const std::uint32_t a = ring_vertex(h, s), b = ring_vertex(h, s + 1);
            const std::uint32_t c = ring_vertex(h + 1, s), d = ring_vertex(h + 1, s + 1);
            mesh.triangles.push_back({a, d, b});
            mesh.triangles.push_back({a, c, d});
        }
    for (int s = 0; s < radial_segments; ++s) {
        mesh.triangles.push_back({top_center, ring_vertex(height_segments, s),
                                  ring_vertex(height_segments, s + 1)});
        mesh.triangles.push_back({bottom_center, ring_vertex(0, s + 1), ring_vertex(0, s)});
    }
    return mesh;
}

Mesh make_rock(std::uint64_t seed, int subdivisions) {
    Mesh mesh = make_icosphere(subdivisions, 1.0);
    mesh.name = "rock";
    SplitMix64 rng(mix_seed(seed, "rock"));

    constexpr int kWaves = 6;
    Vec3 axes[kWaves];
    double amp[kWaves], freq[kWaves], phase[kWaves];
    for (int i = 0; i < kWaves; ++i) {
        axes[i] = normalized({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        amp[i] = rng.uniform(0.03, 0.10);
        freq[i] = rng.uniform(1.5, 5.0);
        phase[i] = rng.uniform(0.0, 2.0 * pi);
    }
    const Vec3 scale{rng.uniform(0.75, 1.25), rng.uniform(0.75, 1.25), rng.uniform(0.75, 1.25)};

    for (Vec3& v : mesh.vertices) {
        const Vec3 dir = normalized(v);
        double r = 1.0;
        for (int i = 0; i < kWaves; ++i)
            r += amp[i] * std::sin(freq[i] * dot(dir, axes[i]) + phase[i]);
        v = {dir.x * r * scale.x, dir.y * r * scale.y, dir.z * r * scale.z};
    }
    return mesh;
}

std::vector<Mesh> make_demo_set(int count, std::uint64_t seed) {
    std::vector<Mesh> assets;
    assets.reserve(count);
    char name[32];
    for (int i = 0; i < count; ++i) {
        const int tier = (i / 4) % 3; // small / medium / large
        const std::uint64_t asset_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        SplitMix64 rng(mix_seed(asset_seed, "variation"));
        Mesh mesh;
        switch (i % 4) {
            case 0:
                mesh = make_rock(asset_seed, 2 + tier);
                std::snprintf(name, sizeof(name), "rock_%02d", i);
                break;
            case 1: {
                const int n = tier == 0 ? 6 : (tier == 1 ? 9 : 13);
                mesh = make_box(n);
                std::snprintf(name, sizeof(name), "box_%02d", i);
                break;
            }
            case 2: {
                const int r = tier == 0 ? 16 : (tier == 1 ? 24 : 32);
                const int h = tier == 0 ? 10 : (tier == 1 ? 14 : 22);
                mesh = make_cylinder(r, h, rng.uniform(0.6, 1.2), rng.uniform(0.8, 1.6));
                std::snprintf(name, sizeof(name), "cyl_%02d", i);
                break;
            }
            default: {
                const int s = tier == 0 ? 16 : (tier == 1 ? 24 : 32);
                const int r = tier == 0 ? 12 : (tier == 1 ? 16 : 24);
                mesh = make_uv_sphere(s, r);
                std::snprintf(name, sizeof(name), "sphere_%02d", i);
                break;
            }
        }
        // Distinct geometry per asset, not just a distinct name: anisotropic
        // scale plus a yaw offset so same-tier primitives never coincide.
        const Vec3 scale{rng.uniform(0.7, 1.3), rng.uniform(0.7, 1.3), rng.uniform(0.7, 1.3)};
        for (Vec3& v : mesh.vertices) v = {v.x * scale.x, v.y * scale.y, v.z * scale.z};
        mesh = rotated_about_y(mesh, rng.uniform(0.0, 360.0));
        mesh.name = name;
        assets.push_back(std::move(mesh));
    }
    return assets;
}

} // namespace lodcheck
