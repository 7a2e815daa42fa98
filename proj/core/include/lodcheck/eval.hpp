#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lodcheck/checkpoint.hpp"
#include "lodcheck/dataset.hpp"
#include "lodcheck/manifest.hpp"
#include "lodcheck/model.hpp"

namespace lodcheck {

struct ConfusionMatrix {
    int classes = 0;
    std::vector<std::uint64_t> counts; // classes x classes, rows = true class

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int num_classes)
        : classes(num_classes),
          counts(static_cast<std::size_t>(num_classes) * num_classes, 0) {}

    std::uint64_t& at(int truth, int predicted) {
        return counts[static_cast<std::size_t>(truth) * classes + predicted];
    }
    std::uint64_t at(int truth, int predicted) const {
        return counts[static_cast<std::size_t>(truth) * classes + predicted];
    }
    void add(int truth, int predicted) { ++at(truth, predicted); }

    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_sum(int truth) const;
    double accuracy() const; // trace / total

    /// Of all misclassified samples, the fraction whose prediction lies in
    /// the +-1 band around the true class.
    double adjacent_fraction() const;

    std::string to_csv() const;
};

/// Accuracy after relabeling true and predicted classes by group. Samples
/// whose true class is in `exclude` are dropped; groups must cover every
/// non-excluded class exactly once (they may also cover excluded classes,
/// which keeps predictions of those classes mappable). A prediction outside
/// all groups never matches.
double merged_accuracy(const ConfusionMatrix& cm,
                       const std::vector<std::vector<int>>& groups,
                       const std::set<int>& exclude = {});

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 8;
    int epochs = 10; // binary default; multiclass runs use 100
    double momentum = 0.9;
    std::uint64_t seed = 0;
};

struct FoldResult {
    int fold = 0;
    std::vector<double> train_accuracy; // one entry per epoch
    double val_accuracy = 0.0;          // final epoch
    double val_accuracy_best = 0.0;
    ConfusionMatrix confusion;          // final epoch, validation samples
};

struct CvResult {
    std::vector<FoldResult> folds;
    double mean_val_accuracy = 0.0;
};

/// All samples of a manifest decoded once and held as 8-bit tensors;
/// batches are materialized to float on demand. Training asks for batches
/// with `forbidden_fold` set to the fold under validation — serving such a
/// sample is a cross-validation isolation bug and throws.
class SampleCache {
public:
    explicit SampleCache(const Manifest& manifest);

    std::size_t size() const { return entries_.size(); }
    int height() const { return height_; }
    int width() const { return width_; }
    int label(std::size_t i) const { return entries_[i].label; }
    int fold(std::size_t i) const { return entries_[i].fold; }
    const std::string& asset(std::size_t i) const { return entries_[i].asset; }

    void fill_batch(std::span<const std::size_t> indices, Tensor<float>& out,
                    std::vector<int>& labels, int forbidden_fold = -1) const;

private:
    struct Entry {
        std::string asset;
        int label;
        int fold;
        std::vector<std::uint8_t> tensor; // [6,H,W]
    };
    std::vector<Entry> entries_;
    int height_ = 0;
    int width_ = 0;
};

struct EvalSummary {
    double accuracy = 0.0;
    ConfusionMatrix confusion;
};

/// Argmax predictions tallied against true labels (inference mode).
EvalSummary evaluate_model(nn::ResConvNet<float>& net, const SampleCache& cache,
                           std::span<const std::size_t> indices);

using FoldTrainedHook =
    std::function<void(int fold, nn::ResConvNet<float>& net)>;
using EpochHook =
    std::function<void(int fold, int epoch, double train_acc, double val_acc)>;

/// Trains one model per fold from identical seeded initial weights and
/// reports per-fold plus mean validation accuracy. `cache` may be shared
/// across calls; when null one is built from the manifest.
CvResult run_cv(const Manifest& manifest, const FoldPlan& plan,
                const nn::ModelConfig& model_cfg, const TrainConfig& train_cfg,
                const SampleCache* cache = nullptr,
                const FoldTrainedHook& on_fold_trained = {},
                const EpochHook& on_epoch = {});

struct GridResult {
    std::vector<int> batch_sizes;       // rows
    std::vector<double> learning_rates; // columns
    std::vector<std::vector<double>> mean_accuracy; // [row][col]

    double cell(int batch_size, double lr) const;
    std::string to_csv() const;
};

/// One run_cv per (batch, lr) cell.
GridResult grid_search(const Manifest& manifest, const FoldPlan& plan,
                       const nn::ModelConfig& model_cfg, const TrainConfig& base_cfg,
                       const std::vector<double>& learning_rates,
                       const std::vector<int>& batch_sizes,
                       const EpochHook& on_epoch = {});

/// Accuracy of one trained model on several held-out manifests, keyed by
/// asset-type name.
std::vector<std::pair<std::string, double>> cross_asset_eval(
    nn::ResConvNet<float>& net,
    const std::vector<std::pair<std::string, const Manifest*>>& test_sets);

} // namespace lodcheck
