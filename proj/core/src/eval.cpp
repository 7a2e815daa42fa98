#include "lodcheck/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "lodcheck/rng.hpp"

namespace lodcheck {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (int i = 0; i < classes; ++i) t += at(i, i);
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
    std::uint64_t t = 0;
    for (int p = 0; p < classes; ++p) t += at(truth, p);
    return t;
}

double ConfusionMatrix::accuracy() const {
    const std::uint64_t t = total();
    return t == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(t);
}

double ConfusionMatrix::adjacent_fraction() const {
    std::uint64_t off_diag = 0, banded = 0;
    for (int t = 0; t < classes; ++t)
        for (int p = 0; p < classes; ++p) {
            if (t == p) continue;
            off_diag += at(t, p);
            if (std::abs(t - p) == 1) banded += at(t, p);
        }
    return off_diag == 0 ? 0.0 : static_cast<double>(banded) / static_cast<double>(off_diag);
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream out;
    out << "truth\\pred";
    for (int p = 0; p < classes; ++p) out << "," << p;
    out << "\n";
    for (int t = 0; t < classes; ++t) {
        out << t;
        for (int p = 0; p < classes; ++p) out << "," << at(t, p);
        out << "\n";
    }
    return out.str();
}

double merged_accuracy(const ConfusionMatrix& cm,
                       const std::vector<std::vector<int>>& groups,
                       const std::set<int>& exclude) {
    std::vector<int> group_of(cm.classes, -1);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int cls : groups[g]) {
            if (cls < 0 || cls >= cm.classes)
                throw std::runtime_error("merged_accuracy: class out of range");
            if (group_of[cls] != -1)
                throw std::runtime_error("merged_accuracy: groups overlap on class " +
                                         std::to_string(cls));
            group_of[cls] = static_cast<int>(g);
        }
    for (int cls = 0; cls < cm.classes; ++cls)
        if (!exclude.contains(cls) && group_of[cls] == -1 && cm.row_sum(cls) > 0)
            throw std::runtime_error("merged_accuracy: class " + std::to_string(cls) +
                                     " is neither grouped nor excluded");

    std::uint64_t kept = 0, correct = 0;
    for (int t = 0; t < cm.classes; ++t) {
        if (exclude.contains(t)) continue;
        for (int p = 0; p < cm.classes; ++p) {
            const std::uint64_t n = cm.at(t, p);
            kept += n;
            if (group_of[t] != -1 && group_of[t] == group_of[p]) correct += n;
        }
    }
    return kept == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(kept);
}

SampleCache::SampleCache(const Manifest& manifest) {
    entries_.reserve(manifest.records.size());
    for (const ManifestRecord& rec : manifest.records) {
        const ImageU8 ref = load_ppm_bytes(manifest.resolve(rec.ref_path));
        const ImageU8 cand = load_ppm_bytes(manifest.resolve(rec.cand_path));
        if (ref.width != cand.width || ref.height != cand.height)
            throw std::runtime_error("sample '" + rec.id + "': image size mismatch");
        if (entries_.empty()) {
            width_ = ref.width;
            height_ = ref.height;
        } else if (ref.width != width_ || ref.height != height_) {
            throw std::runtime_error("sample '" + rec.id + "': resolution differs from dataset");
        }
        Entry e;
        e.asset = rec.asset;
        e.label = rec.label;
        e.fold = rec.fold;
        const std::size_t plane = static_cast<std::size_t>(width_) * height_;
        e.tensor.resize(6 * plane);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < plane; ++i) {
                e.tensor[c * plane + i] = ref.data[i * 3 + c];
                e.tensor[(c + 3) * plane + i] = cand.data[i * 3 + c];
            }
        entries_.push_back(std::move(e));
    }
    if (entries_.empty()) throw std::runtime_error("sample cache: empty manifest");
}

void SampleCache::fill_batch(std::span<const std::size_t> indices, Tensor<float>& out,
                             std::vector<int>& labels, int forbidden_fold) const {
    const int batch = static_cast<int>(indices.size());
    const std::size_t plane = static_cast<std::size_t>(width_) * height_;
    const std::vector<int> shape{batch, 6, height_, width_};
    if (out.shape != shape) out = Tensor<float>(shape);
    labels.resize(indices.size());
    for (int b = 0; b < batch; ++b) {
        const Entry& e = entries_[indices[b]];
        if (forbidden_fold >= 0 && e.fold == forbidden_fold)
            throw std::logic_error("fold isolation violated: training batch asked for a sample "
                                   "of held-out fold " + std::to_string(forbidden_fold));
        labels[b] = e.label;
        float* dst = out.ptr() + static_cast<std::size_t>(b) * 6 * plane;
        for (std::size_t i = 0; i < 6 * plane; ++i)
            dst[i] = static_cast<float>(e.tensor[i]) * (1.0f / 255.0f);
    }
}

namespace {

int argmax_row(const Tensor<float>& logits, int row) {
    const int classes = logits.dim(1);
    const float* r = logits.ptr() + static_cast<std::size_t>(row) * classes;
    int best = 0;
    for (int c = 1; c < classes; ++c)
        if (r[c] > r[best]) best = c;
    return best;
}

constexpr int kEvalBatch = 32;

} // namespace

EvalSummary evaluate_model(nn::ResConvNet<float>& net, const SampleCache& cache,
                           std::span<const std::size_t> indices) {
    EvalSummary summary;
    summary.confusion = ConfusionMatrix(net.cfg.num_classes);
    Tensor<float> batch;
    std::vector<int> labels;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < indices.size(); start += kEvalBatch) {
        const std::size_t n = std::min<std::size_t>(kEvalBatch, indices.size() - start);
        cache.fill_batch(indices.subspan(start, n), batch, labels);
        const Tensor<float> logits = net.forward(batch, /*training=*/false);
        for (std::size_t b = 0; b < n; ++b) {
            const int pred = argmax_row(logits, static_cast<int>(b));
            summary.confusion.add(labels[b], pred);
            if (pred == labels[b]) ++correct;
        }
    }
    summary.accuracy = indices.empty() ? 0.0
                                       : static_cast<double>(correct) / static_cast<double>(indices.size());
    return summary;
}

CvResult run_cv(const Manifest& manifest, const FoldPlan& plan,
                const nn::ModelConfig& model_cfg, const TrainConfig& train_cfg,
                const SampleCache* cache, const FoldTrainedHook& on_fold_trained,
                const EpochHook& on_epoch) {
    if (train_cfg.epochs < 1) throw std::runtime_error("run_cv: epochs must be >= 1");
    if (train_cfg.batch_size < 1) throw std::runtime_error("run_cv: batch size must be >= 1");
    for (const ManifestRecord& rec : manifest.records)
        if (rec.fold < 0 || rec.fold >= plan.k)
            throw std::runtime_error("run_cv: record '" + rec.id + "' has fold " +
                                     std::to_string(rec.fold) + " outside the plan");

    std::optional<SampleCache> owned;
    if (!cache) {
        owned.emplace(manifest);
        cache = &*owned;
    }

    CvResult result;
    double acc_sum = 0.0;
    for (int fold = 0; fold < plan.k; ++fold) {
        std::vector<std::size_t> train_idx, val_idx;
        for (std::size_t i = 0; i < cache->size(); ++i)
            (cache->fold(i) == fold ? val_idx : train_idx).push_back(i);
        if (train_idx.empty() || val_idx.empty())
            throw std::runtime_error("run_cv: fold " + std::to_string(fold) + " is empty");

        nn::ResConvNet<float> net(model_cfg);
        net.init(mix_seed(train_cfg.seed, "init"));

        FoldResult fr;
        fr.fold = fold;
        fr.val_accuracy_best = 0.0;
        Tensor<float> batch;
        std::vector<int> labels;
        for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
            SplitMix64 shuffle_rng(mix_seed(mix_seed(train_cfg.seed, "shuffle"),
                                            (static_cast<std::uint64_t>(fold) << 32) |
                                                static_cast<std::uint64_t>(epoch)));
            std::vector<std::size_t> order = train_idx;
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);

            std::size_t correct = 0;
            for (std::size_t start = 0; start < order.size(); start += train_cfg.batch_size) {
                const std::size_t n =
                    std::min<std::size_t>(train_cfg.batch_size, order.size() - start);
                cache->fill_batch(std::span<const std::size_t>(order).subspan(start, n), batch,
                                  labels, /*forbidden_fold=*/fold);
                net.zero_grad();
                const Tensor<float> logits = net.forward(batch, /*training=*/true);
                Tensor<float> dlogits;
                const float loss = nn::softmax_cross_entropy<float>(logits, labels, &dlogits);
                for (std::size_t b = 0; b < n; ++b)
                    if (argmax_row(logits, static_cast<int>(b)) == labels[b]) ++correct;
                if (!std::isfinite(loss)) {
                    std::fprintf(stderr,
                                 "[train] fold %d epoch %d: non-finite loss, step skipped\n",
                                 fold, epoch);
                    continue;
                }
                net.backward(dlogits);
                net.sgd_step(static_cast<float>(train_cfg.learning_rate),
                             static_cast<float>(train_cfg.momentum));
            }
            fr.train_accuracy.push_back(static_cast<double>(correct) /
                                        static_cast<double>(order.size()));

            const EvalSummary val = evaluate_model(net, *cache, val_idx);
            fr.val_accuracy = val.accuracy;
            fr.val_accuracy_best = std::max(fr.val_accuracy_best, val.accuracy);
            if (epoch == train_cfg.epochs - 1) fr.confusion = val.confusion;
            if (on_epoch) on_epoch(fold, epoch, fr.train_accuracy.back(), val.accuracy);
        }
        acc_sum += fr.val_accuracy;
        result.folds.push_back(std::move(fr));
        if (on_fold_trained) on_fold_trained(fold, net);
    }
    result.mean_val_accuracy = acc_sum / static_cast<double>(plan.k);
    return result;
}

double GridResult::cell(int batch_size, double lr) const {
    for (std::size_t r = 0; r < batch_sizes.size(); ++r)
        for (std::size_t c = 0; c < learning_rates.size(); ++c)
            if (batch_sizes[r] == batch_size && learning_rates[c] == lr)
                return mean_accuracy[r][c];
    throw std::runtime_error("grid cell not found");
}

std::string GridResult::to_csv() const {
    std::ostringstream out;
    out << "batch\\lr";
    for (double lr : learning_rates) out << "," << lr;
    out << "\n";
    for (std::size_t r = 0; r < batch_sizes.size(); ++r) {
        out << batch_sizes[r];
        for (std::size_t c = 0; c < learning_rates.size(); ++c) out << "," << mean_accuracy[r][c];
        out << "\n";
    }
    return out.str();
}

GridResult grid_search(const Manifest& manifest, const FoldPlan& plan,
                       const nn::ModelConfig& model_cfg, const TrainConfig& base_cfg,
                       const std::vector<double>& learning_rates,
                       const std::vector<int>& batch_sizes, const EpochHook& on_epoch) {
    if (learning_rates.empty() || batch_sizes.empty())
        throw std::runtime_error("grid_search: empty grid");
    const SampleCache cache(manifest);
    GridResult grid;
    grid.batch_sizes = batch_sizes;
    grid.learning_rates = learning_rates;
    for (int batch : batch_sizes) {
        std::vector<double> row;
        for (double lr : learning_rates) {
            TrainConfig cfg = base_cfg;
            cfg.learning_rate = lr;
            cfg.batch_size = batch;
            const CvResult cv = run_cv(manifest, plan, model_cfg, cfg, &cache, {}, on_epoch);
            row.push_back(cv.mean_val_accuracy);
        }
        grid.mean_accuracy.push_back(std::move(row));
    }
    return grid;
}

std::vector<std::pair<std::string, double>> cross_asset_eval(
    nn::ResConvNet<float>& net,
    const std::vector<std::pair<std::string, const Manifest*>>& test_sets) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [name, manifest] : test_sets) {
        const SampleCache cache(*manifest);
        std::vector<std::size_t> all(cache.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        out.emplace_back(name, evaluate_model(net, cache, all).accuracy);
    }
    return out;
}

} // namespace lodcheck
