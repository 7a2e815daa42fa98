#include "lodcheck/dataset.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

#include "lodcheck/decimate.hpp"
#include "lodcheck/rng.hpp"

namespace lodcheck {

AugGrid default_grid() {
    AugGrid g;
    g.yaws_deg = {0, 45, 90, 135, 180, 225, 270, 315};
    g.elevations_deg = {-30, -15, 0, 10, 20, 30, 45, 60};
    g.light_dirs = {
        normalized({0.3, 0.8, 0.5}),
        normalized({-0.5, 0.6, 0.6}),
        normalized({0.6, 0.2, 0.8}),
        normalized({-0.2, 0.9, 0.4}),
    };
    g.backgrounds = {
        {0.10f, 0.10f, 0.12f},
        {0.45f, 0.60f, 0.80f},
        {0.75f, 0.68f, 0.55f},
    };
    return g;
}

namespace {

struct CellView {
    ViewSpec view;
    int light_index;
    int background_index;
};

CellView cell_view(const AugGrid& grid, double base_distance, std::size_t cell_index,
                   double yaw, double elevation) {
    CellView cv;
    cv.light_index = static_cast<int>(cell_index % grid.light_dirs.size());
    cv.background_index = static_cast<int>(cell_index % grid.backgrounds.size());
    cv.view.distance = base_distance;
    cv.view.yaw_deg = yaw;
    cv.view.elevation_deg = elevation;
    cv.view.light_dir = grid.light_dirs[cv.light_index];
    cv.view.ambient = grid.ambient;
    cv.view.background = grid.backgrounds[cv.background_index];
    cv.view.resolution = grid.resolution;
    cv.view.fov_deg = grid.fov_deg;
    return cv;
}

// Cached LODs so each (asset, level) is decimated exactly once.
struct LodCache {
    const Mesh* original;
    const QualityPolicy* policy;
    std::map<int, Mesh> lods;

    const Mesh& lod(int level) {
        auto it = lods.find(level);
        if (it != lods.end()) return it->second;
        const auto target = target_vertex_count(
            static_cast<std::uint32_t>(original->vertex_count()), level, *policy);
        return lods.emplace(level, decimate(*original, target)).first->second;
    }
};

void write_pair(const Manifest& manifest, ManifestRecord& rec,
                const Image& ref, const Image& cand) {
    save_ppm(ref, manifest.resolve(rec.ref_path));
    save_ppm(cand, manifest.resolve(rec.cand_path));
}

Manifest build_dataset(const std::vector<Mesh>& assets, const AugGrid& grid,
                       const QualityPolicy& policy, std::uint64_t seed,
                       const std::filesystem::path& out_dir, bool multiclass) {
    if (assets.empty()) throw std::runtime_error("dataset build: no assets");
    if (grid.yaws_deg.empty() || grid.elevations_deg.empty())
        throw std::runtime_error("dataset build: empty augmentation grid");
    validate_policy(policy);

    Manifest manifest;
    manifest.kind = multiclass ? "multiclass" : "binary";
    manifest.seed = seed;
    manifest.dir = out_dir;
    std::filesystem::create_directories(out_dir / "images");

    char cell_tag[64];
    for (const Mesh& asset : assets) {
        validate_mesh(asset);
        LodCache cache{&asset, &policy, {}};
        const double base_distance = fit_distance(asset, grid.fov_deg, grid.frame_fill);
        const auto original_count = static_cast<std::uint32_t>(asset.vertex_count());

        // An asset so small that some level cannot lose a single vertex would
        // break label semantics (candidate == reference with label != 0), so
        // it is skipped whole to preserve class balance.
        bool reducible = true;
        for (int level = 1; level <= kQualityLevels; ++level)
            if (target_vertex_count(original_count, level, policy) >= original_count) {
                reducible = false;
                break;
            }
        if (!reducible) {
            std::fprintf(stderr, "[dataset] skipping asset '%s': too small to decimate\n",
                         asset.name.c_str());
            manifest.skipped.push_back({asset.name, "too small to decimate"});
            continue;
        }

        std::size_t cell_index = 0;
        for (double yaw : grid.yaws_deg) {
            for (double elevation : grid.elevations_deg) {
                const CellView cv = cell_view(grid, base_distance, cell_index, yaw, elevation);
                std::snprintf(cell_tag, sizeof(cell_tag), "%s_c%03zu", asset.name.c_str(),
                              cell_index);

                auto make_record = [&](const std::string& suffix, int label) {
                    ManifestRecord rec;
                    rec.id = std::string(cell_tag) + suffix;
                    rec.asset = asset.name;
                    rec.kind = manifest.kind;
                    rec.label = label;
                    rec.yaw_deg = yaw;
                    rec.elevation_deg = elevation;
                    rec.light = cv.light_index;
                    rec.background = cv.background_index;
                    rec.zoom = grid.zoom_factor;
                    rec.ref_path = "images/" + rec.id + "_ref.ppm";
                    rec.cand_path = "images/" + rec.id + "_cand.ppm";
                    return rec;
                };

                if (multiclass) {
                    for (int level = 1; level <= kQualityLevels; ++level) {
                        auto rec = make_record("_q" + std::to_string(level), level);
                        auto [ref, cand] =
                            render_pair(asset, cache.lod(level), cv.view, grid.zoom_factor);
                        write_pair(manifest, rec, ref, cand);
                        manifest.records.push_back(std::move(rec));
                    }
                } else {
                    auto rec_same = make_record("_n", 0);
                    auto [ref0, cand0] = render_pair(asset, asset, cv.view, grid.zoom_factor);
                    write_pair(manifest, rec_same, ref0, cand0);
                    manifest.records.push_back(std::move(rec_same));

                    SplitMix64 level_rng(
                        mix_seed(mix_seed(seed, asset.name), cell_index));
                    const int level = 1 + static_cast<int>(level_rng.uniform_index(kQualityLevels));
                    auto rec_trans = make_record("_t", 1);
                    auto [ref1, cand1] =
                        render_pair(asset, cache.lod(level), cv.view, grid.zoom_factor);
                    write_pair(manifest, rec_trans, ref1, cand1);
                    manifest.records.push_back(std::move(rec_trans));
                }
                ++cell_index;
            }
        }
    }
    if (manifest.records.empty())
        throw std::runtime_error("dataset build: every asset was skipped");
    return manifest;
}

} // namespace

Manifest build_binary_dataset(const std::vector<Mesh>& assets, const AugGrid& grid,
                              const QualityPolicy& policy, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
    return build_dataset(assets, grid, policy, seed, out_dir, false);
}

Manifest build_multiclass_dataset(const std::vector<Mesh>& assets, const AugGrid& grid,
                                  const QualityPolicy& policy, std::uint64_t seed,
                                  const std::filesystem::path& out_dir) {
    return build_dataset(assets, grid, policy, seed, out_dir, true);
}

SamplePair load_sample(const Manifest& manifest, const ManifestRecord& record) {
    const Image ref = load_ppm(manifest.resolve(record.ref_path));
    const Image cand = load_ppm(manifest.resolve(record.cand_path));
    if (ref.width != cand.width || ref.height != cand.height)
        throw std::runtime_error("sample '" + record.id + "': image size mismatch");

    SamplePair s;
    s.asset = record.asset;
    s.yaw_deg = record.yaw_deg;
    s.elevation_deg = record.elevation_deg;
    s.light = record.light;
    s.background = record.background;
    s.zoom = record.zoom;
    s.label = record.label;
    s.width = ref.width;
    s.height = ref.height;
    const std::size_t plane = static_cast<std::size_t>(s.width) * s.height;
    s.tensor.resize(6 * plane);
    // PPM pixels are interleaved RGB; the sample tensor is planar per channel.
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < plane; ++i) {
            s.tensor[c * plane + i] = ref.data[i * 3 + c];
            s.tensor[(c + 3) * plane + i] = cand.data[i * 3 + c];
        }
    return s;
}

} // namespace lodcheck
