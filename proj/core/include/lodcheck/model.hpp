#pragma once

#include <functional>
#include <optional>

#include "lodcheck/nn.hpp"

namespace lodcheck::nn {

/// Architecture hyperparameters for the 6-channel residual classifier:
/// stem conv (stride 2) -> `stages` stages of residual blocks with channel
/// doubling and stride-2 entry from the second stage on -> global average
/// pool -> linear head.
struct ModelConfig {
    int in_channels = 6;
    int base_channels = 16;
    int stages = 4;
    int blocks_per_stage = 1;
    int num_classes = 2;
    NormKind norm = NormKind::Batch;

    int stage_channels(int stage) const { return base_channels << stage; }
    int final_channels() const { return stage_channels(stages - 1); }
};

template <typename T>
struct ResidualBlock {
    Conv2d<T> conv1, conv2;
    Norm2d<T> norm1, norm2;
    ReluSite<T> relu1, relu_out;
    std::optional<Conv2d<T>> proj;
    std::optional<Norm2d<T>> proj_norm;
    Tensor<T> skip_cache; // identity-path input, kept for the add backward

    void configure(int in_c, int out_c, int stride, NormKind norm) {
        conv1.configure(in_c, out_c, 3, stride, 1);
        norm1.configure(norm, out_c);
        conv2.configure(out_c, out_c, 3, 1, 1);
        norm2.configure(norm, out_c);
        if (in_c != out_c || stride != 1) {
            proj.emplace();
            proj->configure(in_c, out_c, 1, stride, 0);
            proj_norm.emplace();
            proj_norm->configure(norm, out_c);
        }
    }

    void init(SplitMix64& rng) {
        conv1.init(rng);
        conv2.init(rng);
        if (proj) proj->init(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool training) {
        Tensor<T> h = relu1.forward(norm1.forward(conv1.forward(x), training));
        h = norm2.forward(conv2.forward(h), training);
        Tensor<T> skip = proj ? proj_norm->forward(proj->forward(x), training) : x;
        if (!proj) skip_cache = x;
        if (!h.same_shape(skip)) throw std::runtime_error("residual block: shape mismatch");
        for (std::size_t i = 0; i < h.numel(); ++i) h.data[i] += skip.data[i];
        return relu_out.forward(h);
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const Tensor<T> dsum = relu_out.backward(dy);
        Tensor<T> dx = conv1.backward(norm1.backward(relu1.backward(
            conv2.backward(norm2.backward(dsum)))));
        if (proj) {
            const Tensor<T> dskip = proj->backward(proj_norm->backward(dsum));
            for (std::size_t i = 0; i < dx.numel(); ++i) dx.data[i] += dskip.data[i];
        } else {
            for (std::size_t i = 0; i < dx.numel(); ++i) dx.data[i] += dsum.data[i];
        }
        return dx;
    }
};

template <typename T>
struct NamedTensor {
    std::string name;
    Tensor<T>* tensor;
};

template <typename T>
struct ResConvNet {
    ModelConfig cfg;
    Conv2d<T> stem;
    Norm2d<T> stem_norm;
    ReluSite<T> stem_relu;
    std::vector<ResidualBlock<T>> blocks;
    GlobalAvgPool<T> pool;
    Linear<T> head;

    explicit ResConvNet(const ModelConfig& config = {}) : cfg(config) {
        stem.configure(cfg.in_channels, cfg.base_channels, 3, 2, 1);
        stem_norm.configure(cfg.norm, cfg.base_channels);
        int in_c = cfg.base_channels;
        for (int s = 0; s < cfg.stages; ++s) {
            const int out_c = cfg.stage_channels(s);
            for (int b = 0; b < cfg.blocks_per_stage; ++b) {
                const int stride = (s > 0 && b == 0) ? 2 : 1;
                ResidualBlock<T>& block = blocks.emplace_back();
                block.configure(in_c, out_c, stride, cfg.norm);
                in_c = out_c;
            }
        }
        head.configure(cfg.final_channels(), cfg.num_classes);
    }

    void init(std::uint64_t seed) {
        SplitMix64 rng(mix_seed(seed, "model-init"));
        stem.init(rng);
        for (auto& b : blocks) b.init(rng);
        head.init(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool training) {
        if (x.shape.size() != 4 || x.dim(1) != cfg.in_channels)
            throw std::runtime_error("model: expected [B," + std::to_string(cfg.in_channels) +
                                     ",H,W] input, got " + shape_string(x.shape));
        Tensor<T> h = stem_relu.forward(stem_norm.forward(stem.forward(x), training));
        for (auto& b : blocks) h = b.forward(h, training);
        return head.forward(pool.forward(h));
    }

    void backward(const Tensor<T>& dlogits) {
        Tensor<T> g = pool.backward(head.backward(dlogits));
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) g = it->backward(g);
        stem.backward(stem_norm.backward(stem_relu.backward(g)));
    }

    std::vector<Param<T>*> parameters() {
        std::vector<Param<T>*> out{&stem.weight, &stem.bias, &stem_norm.gamma, &stem_norm.beta};
        for (auto& b : blocks) {
            out.push_back(&b.conv1.weight);
            out.push_back(&b.conv1.bias);
            out.push_back(&b.norm1.gamma);
            out.push_back(&b.norm1.beta);
            out.push_back(&b.conv2.weight);
            out.push_back(&b.conv2.bias);
            out.push_back(&b.norm2.gamma);
            out.push_back(&b.norm2.beta);
            if (b.proj) {
                out.push_back(&b.proj->weight);
                out.push_back(&b.proj->bias);
                out.push_back(&b.proj_norm->gamma);
                out.push_back(&b.proj_norm->beta);
            }
        }
        out.push_back(&head.weight);
        out.push_back(&head.bias);
        return out;
    }

    /// Every tensor that defines the model's behaviour, in checkpoint order:
    /// parameters plus norm running statistics.
    std::vector<NamedTensor<T>> named_tensors() {
        std::vector<NamedTensor<T>> out;
        auto add_norm = [&out](const std::string& prefix, Norm2d<T>& n) {
            out.push_back({prefix + ".gamma", &n.gamma.value});
            out.push_back({prefix + ".beta", &n.beta.value});
            out.push_back({prefix + ".running_mean", &n.running_mean});
            out.push_back({prefix + ".running_var", &n.running_var});
        };
        out.push_back({"stem.weight", &stem.weight.value});
        out.push_back({"stem.bias", &stem.bias.value});
        add_norm("stem.norm", stem_norm);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const std::string p = "block" + std::to_string(i);
            ResidualBlock<T>& b = blocks[i];
            out.push_back({p + ".conv1.weight", &b.conv1.weight.value});
            out.push_back({p + ".conv1.bias", &b.conv1.bias.value});
            add_norm(p + ".norm1", b.norm1);
            out.push_back({p + ".conv2.weight", &b.conv2.weight.value});
            out.push_back({p + ".conv2.bias", &b.conv2.bias.value});
            add_norm(p + ".norm2", b.norm2);
            if (b.proj) {
                out.push_back({p + ".proj.weight", &b.proj->weight.value});
                out.push_back({p + ".proj.bias", &b.proj->bias.value});
                add_norm(p + ".proj_norm", *b.proj_norm);
            }
        }
        out.push_back({"head.weight", &head.weight.value});
        out.push_back({"head.bias", &head.bias.value});
        return out;
    }

    void zero_grad() {
        for (Param<T>* p : parameters()) p->zero_grad();
    }
    void sgd_step(T lr, T momentum) {
        for (Param<T>* p : parameters()) p->sgd_step(lr, momentum);
    }
};

/// Mean softmax cross-entropy. When `dlogits` is given it receives
/// d(loss)/d(logits). Throws for labels outside [0, num_classes).
template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels, Tensor<T>* dlogits) {
    const int batch = logits.dim(0);
    const int classes = logits.dim(1);
    if (static_cast<int>(labels.size()) != batch)
        throw std::runtime_error("loss: batch/label count mismatch");
    if (dlogits) *dlogits = Tensor<T>(logits.shape);
    T total = 0;
    for (int b = 0; b < batch; ++b) {
        const int label = labels[b];
        if (label < 0 || label >= classes)
            throw std::runtime_error("loss: label " + std::to_string(label) + " out of range");
        const T* row = logits.ptr() + static_cast<std::size_t>(b) * classes;
        T mx = row[0];
        for (int c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
        T sum = 0;
        for (int c = 0; c < classes; ++c) sum += std::exp(row[c] - mx);
        const T log_z = std::log(sum) + mx;
        total += log_z - row[label];
        if (dlogits) {
            T* drow = dlogits->ptr() + static_cast<std::size_t>(b) * classes;
            for (int c = 0; c < classes; ++c) {
                const T p = std::exp(row[c] - log_z);
                drow[c] = (p - (c == label ? T(1) : T(0))) / static_cast<T>(batch);
            }
        }
    }
    return total / static_cast<T>(batch);
}

/// Duplicate a pretrained 3-channel stem kernel across the channel axis and
/// halve it, so a duplicated (reference == candidate) input reproduces the
/// pretrained activation exactly. Input shape [C0,3,k,k] -> [C0,6,k,k].
template <typename T>
Tensor<T> adapt_first_layer(const Tensor<T>& pretrained_stem) {
    if (pretrained_stem.shape.size() != 4 || pretrained_stem.dim(1) != 3)
        throw std::runtime_error("adapt_first_layer: expected a [C0,3,k,k] stem, got " +
                                 shape_string(pretrained_stem.shape));
    const int out_c = pretrained_stem.dim(0);
    const int k = pretrained_stem.dim(2);
    const int kw = pretrained_stem.dim(3);
    Tensor<T> adapted({out_c, 6, k, kw});
    const std::size_t plane = static_cast<std::size_t>(k) * kw;
    for (int o = 0; o < out_c; ++o)
        for (int c = 0; c < 3; ++c) {
            const T* src = pretrained_stem.ptr() + (static_cast<std::size_t>(o) * 3 + c) * plane;
            T* dst_a = adapted.ptr() + (static_cast<std::size_t>(o) * 6 + c) * plane;
            T* dst_b = adapted.ptr() + (static_cast<std::size_t>(o) * 6 + c + 3) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                const T half = src[i] / T(2);
                dst_a[i] = half;
                dst_b[i] = half;
            }
        }
    return adapted;
}

} // namespace lodcheck::nn
