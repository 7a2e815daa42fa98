#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lodcheck/manifest.hpp"
#include "lodcheck/mesh.hpp"
#include "lodcheck/quality.hpp"
#include "lodcheck/render.hpp"

namespace lodcheck {

/// Augmentation grid: every asset is rendered once per (yaw, elevation)
/// cell; lighting and background cycle deterministically across cells so
/// they add variety without multiplying the sample count.
struct AugGrid {
    std::vector<double> yaws_deg;
    std::vector<double> elevations_deg;
    std::vector<Vec3> light_dirs;                    // camera space, unit
    std::vector<std::array<float, 3>> backgrounds;   // RGB in [0,1]
    double zoom_factor = 1.5;
    int resolution = 224;
    double fov_deg = 40.0;
    double ambient = 0.25;
    double frame_fill = 0.6;

    std::size_t cells() const { return yaws_deg.size() * elevations_deg.size(); }
};

/// 8 yaws x 8 elevations, 4 lights, 3 backgrounds.
AugGrid default_grid();

/// One dataset element: both images stacked channel-wise.
struct SamplePair {
    std::string asset;
    double yaw_deg = 0.0;
    double elevation_deg = 0.0;
    int light = 0;
    int background = 0;
    double zoom = 1.5;
    int label = 0;
    int height = 0;
    int width = 0;
    std::vector<float> tensor; // [6,H,W]: ref in channels 0-2, candidate in 3-5
};

/// Per asset x grid cell, one non-transition pair (candidate == reference)
/// and one transition pair (candidate decimated to a seeded level in 1..6).
/// Labels come out exactly balanced. Images are written under
/// out_dir/images/, the manifest records reference them relatively.
Manifest build_binary_dataset(const std::vector<Mesh>& assets, const AugGrid& grid,
                              const QualityPolicy& policy, std::uint64_t seed,
                              const std::filesystem::path& out_dir);

/// Per asset x grid cell, six pairs with the candidate at quality levels
/// 1..6 under identical view parameters; classes appear in equal ratio.
Manifest build_multiclass_dataset(const std::vector<Mesh>& assets, const AugGrid& grid,
                                  const QualityPolicy& policy, std::uint64_t seed,
                                  const std::filesystem::path& out_dir);

/// Load both images of a record and stack them into the 6-channel tensor,
/// scaled to [0,1]. Throws when an image is missing or corrupt.
SamplePair load_sample(const Manifest& manifest, const ManifestRecord& record);

} // namespace lodcheck
