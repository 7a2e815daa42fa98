#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lodcheck {

/// One labeled pair: ids, view parameters, image locations, fold.
/// Paths are stored relative to the manifest's directory.
struct ManifestRecord {
    std::string id;
    std::string asset;
    std::string kind; // binary | multiclass
    int label = 0;    // binary: 0|1; multiclass: quality level 1..6
    double yaw_deg = 0.0;
    double elevation_deg = 0.0;
    int light = 0;
    int background = 0;
    double zoom = 1.5;
    std::string ref_path;
    std::string cand_path;
    int fold = -1;
};

struct SkippedAsset {
    std::string asset;
    std::string reason;
};

struct Manifest {
    std::string kind;
    std::uint64_t seed = 0;
    std::vector<ManifestRecord> records;
    std::vector<SkippedAsset> skipped;
    std::filesystem::path dir; // resolution base for relative paths; not serialized

    std::filesystem::path resolve(const std::string& rel) const { return dir / rel; }
};

/// Line-delimited JSON: a header line with {kind, seed, skipped}, then one
/// record object per line. Byte-deterministic for identical content.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// Asset-level assignment of samples to k cross-validation folds.
struct FoldPlan {
    int k = 0;
    std::map<std::string, int> assignment;

    int fold_of(const std::string& asset) const;
};

/// Unique assets shuffled by seed, dealt round-robin into k folds.
/// Throws if k < 2 or there are fewer assets than folds.
FoldPlan make_folds(const Manifest& manifest, int k, std::uint64_t seed);

/// Stamp each record's fold from the plan.
void apply_folds(Manifest& manifest, const FoldPlan& plan);

} // namespace lodcheck
