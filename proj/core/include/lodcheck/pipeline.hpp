#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lodcheck/demo_assets.hpp"
#include "lodcheck/eval.hpp"

namespace lodcheck::pipeline {

/// Generate `count` procedural assets and write them as OBJ files.
std::vector<Mesh> write_demo_assets(int count, std::uint64_t seed,
                                    const std::filesystem::path& dir);

struct DatasetOptions {
    std::string kind = "binary"; // binary | multiclass
    AugGrid grid = default_grid();
    QualityPolicy policy = default_quality_policy();
    std::uint64_t seed = 0;
    int folds = 5;
};

/// Build the dataset, assign asset-disjoint folds, and persist
/// out_dir/manifest.jsonl plus a resolved-config snapshot.
Manifest build_dataset(const std::vector<Mesh>& assets, const DatasetOptions& opts,
                       const std::filesystem::path& out_dir);

struct TrainOptions {
    std::string task = "binary";
    nn::ModelConfig model;          // num_classes is overwritten from task
    TrainConfig train;
    int folds = 5;
    bool save_checkpoints = true;
    std::filesystem::path stem_init; // optional pretrained 3-channel stem to adapt
};

struct TrainOutput {
    std::string run_id;
    CvResult cv;
    std::vector<std::filesystem::path> checkpoints; // one per fold when saved
};

/// Cross-validated training: checkpoints, runs.csv and per-fold confusion
/// CSVs land in out_dir. Reuses the manifest's fold assignment when it
/// matches opts.folds, otherwise deals new folds from the training seed.
TrainOutput train(const Manifest& manifest, const TrainOptions& opts,
                  const std::filesystem::path& out_dir);

struct GridOptions {
    std::string task = "binary";
    nn::ModelConfig model;
    TrainConfig base;
    std::vector<double> learning_rates{0.1, 0.01, 0.001};
    std::vector<int> batch_sizes{8, 16, 32, 64, 128};
    int folds = 5;
};

GridResult grid(const Manifest& manifest, const GridOptions& opts,
                const std::filesystem::path& out_dir);

/// FNV-1a content hash used for run ids (16 hex digits).
std::string config_hash(const std::string& canonical_json);

/// Write a resolved-config snapshot `<name>_config.json` beside outputs.
void write_snapshot(const std::filesystem::path& out_dir, const std::string& name,
                    const std::string& config_json);

/// Fold plan recovered from record stamps; throws when records are
/// unstamped, inconsistent per asset, or do not cover folds 0..k-1.
FoldPlan plan_from_manifest(const Manifest& manifest, int expected_k);

} // namespace lodcheck::pipeline
