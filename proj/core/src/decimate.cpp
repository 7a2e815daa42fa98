#include "lodcheck/decimate.hpp"

#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

namespace lodcheck {

namespace {

constexpr double kBoundaryWeight = 1e3;
constexpr double kDegenerateArea = 1e-24;

struct HeapEntry {
    double cost;
    std::uint32_t a, b;       // a < b
    std::uint32_t version_a, version_b;
    Vec3 position;
    bool penalized;
};

struct HeapOrder {
    bool operator()(const HeapEntry& l, const HeapEntry& r) const {
        if (l.cost != r.cost) return l.cost > r.cost;
        if (l.a != r.a) return l.a > r.a;
        return l.b > r.b;
    }
};

struct Collapser {
    std::vector<Vec3> positions;
    std::vector<Quadric> quadrics;
    std::vector<std::uint32_t> versions;
    std::vector<bool> vertex_alive;
    std::vector<Triangle> faces;
    std::vector<bool> face_alive;
    std::vector<std::vector<std::uint32_t>> vertex_faces;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap;
    std::size_t alive_vertices = 0;

    explicit Collapser(const Mesh& mesh) {
        positions = mesh.vertices;
        faces = mesh.triangles;
        const std::size_t nv = positions.size();
        quadrics.resize(nv);
        versions.assign(nv, 0);
        vertex_alive.assign(nv, false);
        face_alive.assign(faces.size(), true);
        vertex_faces.resize(nv);

        for (std::uint32_t f = 0; f < faces.size(); ++f)
            for (std::uint32_t corner : faces[f]) {
                vertex_faces[corner].push_back(f);
                vertex_alive[corner] = true;
            }
        for (bool alive : vertex_alive) alive_vertices += alive ? 1 : 0;

        for (std::uint32_t v = 0; v < nv; ++v) quadrics[v] = face_quadric_sum(v);
        add_boundary_penalties();
        seed_heap();
    }

    Vec3 face_normal(std::uint32_t f) const {
        const Triangle& t = faces[f];
        return cross(positions[t[1]] - positions[t[0]], positions[t[2]] - positions[t[0]]);
    }

    Quadric face_quadric_sum(std::uint32_t v) const {
        Quadric q;
        for (std::uint32_t f : vertex_faces[v]) {
            const Vec3 n = face_normal(f);
            const double area2 = length(n);
            if (area2 <= 0.0) continue;
            const Vec3 unit = n / area2;
            const double area = 0.5 * area2;
            q += plane_quadric(unit, -dot(unit, positions[faces[f][0]]), area);
        }
        return q;
    }

    // An edge with exactly one incident face gets a penalty plane through the
    // edge, perpendicular to that face; collapsing the silhouette away from
    // the boundary line then carries a large cost.
    void add_boundary_penalties() {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, std::uint32_t>> edge_faces;
        for (std::uint32_t f = 0; f < faces.size(); ++f) {
            const Triangle& t = faces[f];
            for (int e = 0; e < 3; ++e) {
                std::uint32_t a = t[e], b = t[(e + 1) % 3];
                if (a > b) std::swap(a, b);
                auto& entry = edge_faces[{a, b}];
                entry.first += 1;
                entry.second = f;
            }
        }
        for (const auto& [edge, info] : edge_faces) {
            if (info.first != 1) continue;
            const Vec3& pa = positions[edge.first];
            const Vec3& pb = positions[edge.second];
            const Vec3 dir = pb - pa;
            const double len = length(dir);
            if (len <= 0.0) continue;
            const Vec3 fn = normalized(face_normal(info.second));
            const Vec3 pn = normalized(cross(dir, fn));
            if (length(pn) == 0.0) continue;
            const Quadric q = plane_quadric(pn, -dot(pn, pa), kBoundaryWeight * len);
            quadrics[edge.first] += q;
            quadrics[edge.second] += q;
        }
    }

    void push_edge(std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        const CollapseTarget t = optimal_collapse_position(quadrics[a] + quadrics[b],
                                                           positions[a], positions[b]);
        heap.push({t.cost, a, b, versions[a], versions[b], t.position, false});
    }

    void seed_heap() {
        std::map<std::pair<std::uint32_t, std::uint32_t>, bool> seen;
        for (const Triangle& t : faces)
            for (int e = 0; e < 3; ++e) {
                std::uint32_t a = t[e], b = t[(e + 1) % 3];
                if (a > b) std::swap(a, b);
                if (!seen.emplace(std::make_pair(a, b), true).second) continue;
                push_edge(a, b);
            }
    }

    // A collapse is illegal if any surviving face incident to either endpoint
    // would flip its normal or collapse to zero area at the merged position.
    bool flips_normal(std::uint32_t a, std::uint32_t b, const Vec3& pos) const {
        for (std::uint32_t v : {a, b}) {
            for (std::uint32_t f : vertex_faces[v]) {
                if (!face_alive[f]) continue;
                const Triangle& t = faces[f];
                const bool has_a = t[0] == a || t[1] == a || t[2] == a;
                const bool has_b = t[0] == b || t[1] == b || t[2] == b;
                if (has_a && has_b) continue; // face dies with the collapse
                const Vec3 before = face_normal(f);
                Vec3 p[3];
                for (int i = 0; i < 3; ++i)
                    p[i] = (t[i] == a || t[i] == b) ? pos : positions[t[i]];
                const Vec3 after = cross(p[1] - p[0], p[2] - p[0]);
                if (dot(before, after) < 0.0) return true;
                if (length(after) < kDegenerateArea) return true;
            }
        }
        return false;
    }

    void collapse(std::uint32_t a, std::uint32_t b, const Vec3& pos) {
        positions[a] = pos;
        quadrics[a] += quadrics[b];
        vertex_alive[b] = false;
        --alive_vertices;

        // Kill faces containing both endpoints, remap b -> a in the rest.
        for (std::uint32_t f : vertex_faces[b]) {
            if (!face_alive[f]) continue;
            Triangle& t = faces[f];
            const bool has_a = t[0] == a || t[1] == a || t[2] == a;
            if (has_a) {
                face_alive[f] = false;
                continue;
            }
            for (int i = 0; i < 3; ++i)
                if (t[i] == b) t[i] = a;
            vertex_faces[a].push_back(f);
        }
        vertex_faces[b].clear();
        versions[a] += 1;
        versions[b] += 1;

        // Refresh candidate entries for every edge around the merged vertex.
        std::vector<std::uint32_t> neighbors;
        for (std::uint32_t f : vertex_faces[a]) {
            if (!face_alive[f]) continue;
            for (std::uint32_t corner : faces[f])
                if (corner != a) neighbors.push_back(corner);
        }
        std::sort(neighbors.begin(), neighbors.end());
        neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
        for (std::uint32_t n : neighbors) push_edge(a, n);
    }

    void run(std::uint32_t target) {
        while (alive_vertices > target && !heap.empty()) {
            HeapEntry e = heap.top();
            heap.pop();
            if (!vertex_alive[e.a] || !vertex_alive[e.b]) continue;
            if (versions[e.a] != e.version_a || versions[e.b] != e.version_b) continue;
            if (flips_normal(e.a, e.b, e.position)) {
                if (!e.penalized) {
                    e.cost += kBoundaryWeight * (1.0 + e.cost);
                    e.penalized = true;
                    heap.push(e);
                }
                continue;
            }
            collapse(e.a, e.b, e.position);
        }
    }

    Mesh extract(const Mesh& original) const {
        Mesh out;
        out.name = original.name;
        std::vector<std::uint32_t> remap(positions.size(), 0);
        for (std::uint32_t v = 0; v < positions.size(); ++v) {
            if (!vertex_alive[v]) continue;
            remap[v] = static_cast<std::uint32_t>(out.vertices.size());
            out.vertices.push_back(positions[v]);
        }
        for (std::uint32_t f = 0; f < faces.size(); ++f) {
            if (!face_alive[f]) continue;
            const Triangle& t = faces[f];
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
            const Vec3 n = cross(positions[t[1]] - positions[t[0]],
                                 positions[t[2]] - positions[t[0]]);
            if (length(n) < kDegenerateArea) continue;
            out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
        }
        return out;
    }
};

} // namespace

Quadric quadric_of_vertex(const Mesh& mesh, std::uint32_t vertex) {
    if (vertex >= mesh.vertices.size())
        throw std::runtime_error("quadric_of_vertex: vertex index out of range");
    Quadric q;
    for (const Triangle& t : mesh.triangles) {
        if (t[0] != vertex && t[1] != vertex && t[2] != vertex) continue;
        const Vec3 n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                             mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        const double twice_area = length(n);
        if (twice_area <= 0.0) continue;
        const Vec3 unit = n / twice_area;
        q += plane_quadric(unit, -dot(unit, mesh.vertices[t[0]]), 0.5 * twice_area);
    }
    return q;
}

Mesh decimate(const Mesh& mesh, std::uint32_t target_vertices) {
    if (target_vertices < 3)
        throw std::runtime_error("decimate: target vertex count must be >= 3");
    validate_mesh(mesh);
    if (target_vertices >= mesh.vertices.size()) return mesh;

    Collapser c(mesh);
    c.run(target_vertices);
    Mesh out = c.extract(mesh);
    validate_mesh(out);
    return out;
}

} // namespace lodcheck
