#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodcheck/gemm.hpp"
#include "lodcheck/rng.hpp"
#include "lodcheck/tensor.hpp"

namespace lodcheck::nn {

enum class NormKind { Batch, Group };

constexpr double kNormEps = 1e-5;
constexpr double kRunningMomentum = 0.1;

/// Learnable tensor with its gradient and SGD velocity buffer.
template <typename T>
struct Param {
    Tensor<T> value;
    Tensor<T> grad;
    Tensor<T> velocity;

    void resize(std::vector<int> shape) {
        value = Tensor<T>(shape);
        grad = Tensor<T>(shape);
        velocity = Tensor<T>(std::move(shape));
    }
    void zero_grad() { grad.fill(T(0)); }
    void sgd_step(T lr, T momentum) {
        for (std::size_t i = 0; i < value.numel(); ++i) {
            velocity.data[i] = momentum * velocity.data[i] - lr * grad.data[i];
            value.data[i] += velocity.data[i];
        }
    }
};

namespace detail {

// x: [B,C,H,W] -> col: [C*k*k, B*OH*OW]
template <typename T>
void im2col(const Tensor<T>& x, int ksize, int stride, int pad, int oh, int ow, Tensor<T>& col) {
    const int batch = x.dim(0), channels = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int ncol = batch * oh * ow;
    for (int c = 0; c < channels; ++c) {
        for (int ky = 0; ky < ksize; ++ky) {
            for (int kx = 0; kx < ksize; ++kx) {
                const int row = (c * ksize + ky) * ksize + kx;
                T* dst = col.ptr() + static_cast<std::size_t>(row) * ncol;
                for (int b = 0; b < batch; ++b) {
                    const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * h * w;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride + ky - pad;
                        T* out = dst + (static_cast<std::size_t>(b) * oh + oy) * ow;
                        if (iy < 0 || iy >= h) {
                            for (int ox = 0; ox < ow; ++ox) out[ox] = T(0);
                            continue;
                        }
                        const T* in_row = src + static_cast<std::size_t>(iy) * w;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * stride + kx - pad;
                            out[ox] = (ix >= 0 && ix < w) ? in_row[ix] : T(0);
                        }
                    }
                }
            }
        }
    }
}

// dcol: [C*k*k, B*OH*OW] scattered back into dx: [B,C,H,W] (accumulating).
template <typename T>
void col2im(const Tensor<T>& dcol, int ksize, int stride, int pad, int oh, int ow, Tensor<T>& dx) {
    const int batch = dx.dim(0), channels = dx.dim(1), h = dx.dim(2), w = dx.dim(3);
    const int ncol = batch * oh * ow;
    dx.fill(T(0));
    for (int c = 0; c < channels; ++c) {
        for (int ky = 0; ky < ksize; ++ky) {
            for (int kx = 0; kx < ksize; ++kx) {
                const int row = (c * ksize + ky) * ksize + kx;
                const T* src = dcol.ptr() + static_cast<std::size_t>(row) * ncol;
                for (int b = 0; b < batch; ++b) {
                    T* dst = dx.ptr() + (static_cast<std::size_t>(b) * channels + c) * h * w;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= h) continue;
                        const T* in_row = src + (static_cast<std::size_t>(b) * oh + oy) * ow;
                        T* out_row = dst + static_cast<std::size_t>(iy) * w;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * stride + kx - pad;
                            if (ix >= 0 && ix < w) out_row[ix] += in_row[ox];
                        }
                    }
                }
            }
        }
    }
}

// [C, B*H*W] (column index (b,y,x)) -> [B,C,H,W]
template <typename T>
void nchw_from_cn(const Tensor<T>& cn, Tensor<T>& out) {
    const int batch = out.dim(0), channels = out.dim(1);
    const std::size_t plane = static_cast<std::size_t>(out.dim(2)) * out.dim(3);
    for (int c = 0; c < channels; ++c) {
        const T* src = cn.ptr() + static_cast<std::size_t>(c) * batch * plane;
        for (int b = 0; b < batch; ++b) {
            T* dst = out.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
            const T* s = src + static_cast<std::size_t>(b) * plane;
            for (std::size_t i = 0; i < plane; ++i) dst[i] = s[i];
        }
    }
}

template <typename T>
void cn_from_nchw(const Tensor<T>& x, Tensor<T>& cn) {
    const int batch = x.dim(0), channels = x.dim(1);
    const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
    for (int c = 0; c < channels; ++c) {
        T* dst = cn.ptr() + static_cast<std::size_t>(c) * batch * plane;
        for (int b = 0; b < batch; ++b) {
            const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
            T* d = dst + static_cast<std::size_t>(b) * plane;
            for (std::size_t i = 0; i < plane; ++i) d[i] = src[i];
        }
    }
}

} // namespace detail

template <typename T>
struct Conv2d {
    int in_channels = 0, out_channels = 0, ksize = 3, stride = 1, pad = 1;
    Param<T> weight; // [out_c, in_c, k, k], rows contiguous as [out_c][in_c*k*k]
    Param<T> bias;   // [out_c]

    // forward caches for the backward pass
    Tensor<T> col;        // [K, B*OH*OW]
    std::vector<int> input_shape;

    void configure(int in_c, int out_c, int k, int s, int p) {
        in_channels = in_c;
        out_channels = out_c;
        ksize = k;
        stride = s;
        pad = p;
        weight.resize({out_c, in_c, k, k});
        bias.resize({out_c});
    }

    void init(SplitMix64& rng) {
        const double stddev = std::sqrt(2.0 / (in_channels * ksize * ksize));
        for (T& v : weight.value.data) v = static_cast<T>(rng.normal() * stddev);
        bias.value.fill(T(0));
    }

    int out_extent(int in_extent) const { return (in_extent + 2 * pad - ksize) / stride + 1; }

    Tensor<T> forward(const Tensor<T>& x) {
        if (x.dim(1) != in_channels)
            throw std::runtime_error("conv: expected " + std::to_string(in_channels) +
                                     " input channels, got " + shape_string(x.shape));
        const int batch = x.dim(0);
        const int oh = out_extent(x.dim(2));
        const int ow = out_extent(x.dim(3));
        const int kdim = in_channels * ksize * ksize;
        const int ncol = batch * oh * ow;
        input_shape = x.shape;

        if (col.shape != std::vector<int>{kdim, ncol}) col = Tensor<T>({kdim, ncol});
        detail::im2col(x, ksize, stride, pad, oh, ow, col);

        Tensor<T> cn({out_channels, ncol});
        gemm_nn(weight.value.ptr(), col.ptr(), cn.ptr(), out_channels, ncol, kdim);
        for (int oc = 0; oc < out_channels; ++oc) {
            T* row = cn.ptr() + static_cast<std::size_t>(oc) * ncol;
            const T b = bias.value.data[oc];
            for (int i = 0; i < ncol; ++i) row[i] += b;
        }
        Tensor<T> y({batch, out_channels, oh, ow});
        detail::nchw_from_cn(cn, y);
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const int batch = dy.dim(0);
        const int oh = dy.dim(2), ow = dy.dim(3);
        const int kdim = in_channels * ksize * ksize;
        const int ncol = batch * oh * ow;

        Tensor<T> dcn({out_channels, ncol});
        detail::cn_from_nchw(dy, dcn);

        // dW[oc][k] = sum_n dY[oc][n] * col[k][n]
        gemm_nt(dcn.ptr(), col.ptr(), weight.grad.ptr(), out_channels, kdim, ncol);
        for (int oc = 0; oc < out_channels; ++oc) {
            const T* row = dcn.ptr() + static_cast<std::size_t>(oc) * ncol;
            T sum = 0;
            for (int i = 0; i < ncol; ++i) sum += row[i];
            bias.grad.data[oc] = sum;
        }

        // dcol = W^T * dY
        Tensor<T> wt({kdim, out_channels});
        for (int oc = 0; oc < out_channels; ++oc)
            for (int k = 0; k < kdim; ++k)
                wt.data[static_cast<std::size_t>(k) * out_channels + oc] =
                    weight.value.data[static_cast<std::size_t>(oc) * kdim + k];
        Tensor<T> dcol({kdim, ncol});
        gemm_nn(wt.ptr(), dcn.ptr(), dcol.ptr(), kdim, ncol, out_channels);

        Tensor<T> dx(input_shape);
        detail::col2im(dcol, ksize, stride, pad, oh, ow, dx);
        return dx;
    }
};

/// Per-channel batch statistics with running averages for inference, or a
/// per-sample group-statistics mode for very small batches.
template <typename T>
struct Norm2d {
    NormKind kind = NormKind::Batch;
    int channels = 0;
    int groups = 1;
    Param<T> gamma, beta;
    Tensor<T> running_mean, running_var;

    Tensor<T> xhat;
    std::vector<T> inv_std; // per channel (batch) or per (sample, group)

    void configure(NormKind k, int c) {
        kind = k;
        channels = c;
        const int group_channels = std::min(8, c);
        groups = std::max(1, c / group_channels);
        gamma.resize({c});
        beta.resize({c});
        gamma.value.fill(T(1));
        beta.value.fill(T(0));
        running_mean = Tensor<T>({c});
        running_var = Tensor<T>({c});
        running_var.fill(T(1));
    }

    Tensor<T> forward(const Tensor<T>& x, bool training) {
        const int batch = x.dim(0);
        const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
        Tensor<T> y(x.shape);
        if (kind == NormKind::Batch) {
            if (training) {
                xhat = Tensor<T>(x.shape);
                inv_std.assign(channels, T(0));
                const std::size_t m = static_cast<std::size_t>(batch) * plane;
                for (int c = 0; c < channels; ++c) {
                    T mean = 0, var = 0;
                    for (int b = 0; b < batch; ++b) {
                        const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
                        for (std::size_t i = 0; i < plane; ++i) mean += src[i];
                    }
                    mean /= static_cast<T>(m);
                    for (int b = 0; b < batch; ++b) {
                        const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
                        for (std::size_t i = 0; i < plane; ++i) {
                            const T d = src[i] - mean;
                            var += d * d;
                        }
                    }
                    var /= static_cast<T>(m);
                    const T istd = T(1) / std::sqrt(var + static_cast<T>(kNormEps));
                    inv_std[c] = istd;
                    running_mean.data[c] = static_cast<T>(1.0 - kRunningMomentum) * running_mean.data[c] +
                                           static_cast<T>(kRunningMomentum) * mean;
                    running_var.data[c] = static_cast<T>(1.0 - kRunningMomentum) * running_var.data[c] +
                                          static_cast<T>(kRunningMomentum) * var;
                    const T g = gamma.value.data[c], be = beta.value.data[c];
                    for (int b = 0; b < batch; ++b) {
                        const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                        const T* src = x.ptr() + off;
                        T* xh = xhat.ptr() + off;
                        T* dst = y.ptr() + off;
                        for (std::size_t i = 0; i < plane; ++i) {
                            xh[i] = (src[i] - mean) * istd;
                            dst[i] = g * xh[i] + be;
                        }
                    }
                }
            } else {
                for (int c = 0; c < channels; ++c) {
                    const T istd = T(1) / std::sqrt(running_var.data[c] + static_cast<T>(kNormEps));
                    const T mean = running_mean.data[c];
                    const T g = gamma.value.data[c], be = beta.value.data[c];
                    for (int b = 0; b < batch; ++b) {
                        const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                        const T* src = x.ptr() + off;
                        T* dst = y.ptr() + off;
                        for (std::size_t i = 0; i < plane; ++i) dst[i] = g * (src[i] - mean) * istd + be;
                    }
                }
            }
        } else {
            // Group statistics: independent of batch size, identical in
            // training and inference.
            xhat = Tensor<T>(x.shape);
            const int cg = channels / groups;
            inv_std.assign(static_cast<std::size_t>(batch) * groups, T(0));
            const std::size_t m = static_cast<std::size_t>(cg) * plane;
            for (int b = 0; b < batch; ++b) {
                for (int g = 0; g < groups; ++g) {
                    T mean = 0, var = 0;
                    for (int c = g * cg; c < (g + 1) * cg; ++c) {
                        const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
                        for (std::size_t i = 0; i < plane; ++i) mean += src[i];
                    }
                    mean /= static_cast<T>(m);
                    for (int c = g * cg; c < (g + 1) * cg; ++c) {
                        const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
                        for (std::size_t i = 0; i < plane; ++i) {
                            const T d = src[i] - mean;
                            var += d * d;
                        }
                    }
                    var /= static_cast<T>(m);
                    const T istd = T(1) / std::sqrt(var + static_cast<T>(kNormEps));
                    inv_std[static_cast<std::size_t>(b) * groups + g] = istd;
                    for (int c = g * cg; c < (g + 1) * cg; ++c) {
                        const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                        const T* src = x.ptr() + off;
                        T* xh = xhat.ptr() + off;
                        T* dst = y.ptr() + off;
                        const T gm = gamma.value.data[c], be = beta.value.data[c];
                        for (std::size_t i = 0; i < plane; ++i) {
                            xh[i] = (src[i] - mean) * istd;
                            dst[i] = gm * xh[i] + be;
                        }
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const int batch = dy.dim(0);
        const std::size_t plane = static_cast<std::size_t>(dy.dim(2)) * dy.dim(3);
        Tensor<T> dx(dy.shape);
        if (kind == NormKind::Batch) {
            const std::size_t m = static_cast<std::size_t>(batch) * plane;
            for (int c = 0; c < channels; ++c) {
                T sum_dy = 0, sum_dy_xhat = 0;
                for (int b = 0; b < batch; ++b) {
                    const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                    const T* d = dy.ptr() + off;
                    const T* xh = xhat.ptr() + off;
                    for (std::size_t i = 0; i < plane; ++i) {
                        sum_dy += d[i];
                        sum_dy_xhat += d[i] * xh[i];
                    }
                }
                gamma.grad.data[c] += sum_dy_xhat;
                beta.grad.data[c] += sum_dy;
                const T g = gamma.value.data[c];
                const T istd = inv_std[c];
                const T mean_dy = sum_dy / static_cast<T>(m);
                const T mean_dy_xhat = sum_dy_xhat / static_cast<T>(m);
                for (int b = 0; b < batch; ++b) {
                    const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                    const T* d = dy.ptr() + off;
                    const T* xh = xhat.ptr() + off;
                    T* out = dx.ptr() + off;
                    for (std::size_t i = 0; i < plane; ++i)
                        out[i] = g * istd * (d[i] - mean_dy - xh[i] * mean_dy_xhat);
                }
            }
        } else {
            const int cg = channels / groups;
            const std::size_t m = static_cast<std::size_t>(cg) * plane;
            // dgamma/dbeta first (per channel, across the batch)
            for (int c = 0; c < channels; ++c) {
                T sum_dy = 0, sum_dy_xhat = 0;
                for (int b = 0; b < batch; ++b) {
                    const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                    const T* d = dy.ptr() + off;
                    const T* xh = xhat.ptr() + off;
                    for (std::size_t i = 0; i < plane; ++i) {
                        sum_dy += d[i];
                        sum_dy_xhat += d[i] * xh[i];
                    }
                }
                gamma.grad.data[c] += sum_dy_xhat;
                beta.grad.data[c] += sum_dy;
            }
            for (int b = 0; b < batch; ++b) {
                for (int g = 0; g < groups; ++g) {
                    T sum_dxh = 0, sum_dxh_xhat = 0;
                    for (int c = g * cg; c < (g + 1) * cg; ++c) {
                        const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                        const T* d = dy.ptr() + off;
                        const T* xh = xhat.ptr() + off;
                        const T gm = gamma.value.data[c];
                        for (std::size_t i = 0; i < plane; ++i) {
                            sum_dxh += d[i] * gm;
                            sum_dxh_xhat += d[i] * gm * xh[i];
                        }
                    }
                    const T istd = inv_std[static_cast<std::size_t>(b) * groups + g];
                    const T mean_dxh = sum_dxh / static_cast<T>(m);
                    const T mean_dxh_xhat = sum_dxh_xhat / static_cast<T>(m);
                    for (int c = g * cg; c < (g + 1) * cg; ++c) {
                        const std::size_t off = (static_cast<std::size_t>(b) * channels + c) * plane;
                        const T* d = dy.ptr() + off;
                        const T* xh = xhat.ptr() + off;
                        T* out = dx.ptr() + off;
                        const T gm = gamma.value.data[c];
                        for (std::size_t i = 0; i < plane; ++i)
                            out[i] = istd * (d[i] * gm - mean_dxh - xh[i] * mean_dxh_xhat);
                    }
                }
            }
        }
        return dx;
    }
};

template <typename T>
struct ReluSite {
    Tensor<T> mask; // 1 where input > 0

    Tensor<T> forward(const Tensor<T>& x) {
        mask = Tensor<T>(x.shape);
        Tensor<T> y(x.shape);
        for (std::size_t i = 0; i < x.numel(); ++i) {
            const bool pos = x.data[i] > T(0);
            mask.data[i] = pos ? T(1) : T(0);
            y.data[i] = pos ? x.data[i] : T(0);
        }
        return y;
    }
    Tensor<T> backward(const Tensor<T>& dy) const {
        Tensor<T> dx(dy.shape);
        for (std::size_t i = 0; i < dy.numel(); ++i) dx.data[i] = dy.data[i] * mask.data[i];
        return dx;
    }
};

template <typename T>
struct Linear {
    int in_features = 0, out_features = 0;
    Param<T> weight; // [out, in]
    Param<T> bias;   // [out]
    Tensor<T> input; // [B, in]

    void configure(int in_f, int out_f) {
        in_features = in_f;
        out_features = out_f;
        weight.resize({out_f, in_f});
        bias.resize({out_f});
    }
    void init(SplitMix64& rng) {
        const double stddev = std::sqrt(2.0 / in_features);
        for (T& v : weight.value.data) v = static_cast<T>(rng.normal() * stddev);
        bias.value.fill(T(0));
    }

    Tensor<T> forward(const Tensor<T>& x) {
        if (x.dim(1) != in_features) throw std::runtime_error("linear: feature mismatch");
        input = x;
        const int batch = x.dim(0);
        Tensor<T> y({batch, out_features});
        gemm_nt(x.ptr(), weight.value.ptr(), y.ptr(), batch, out_features, in_features);
        for (int b = 0; b < batch; ++b)
            for (int o = 0; o < out_features; ++o)
                y.data[static_cast<std::size_t>(b) * out_features + o] += bias.value.data[o];
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const int batch = dy.dim(0);
        // dW[o][i] = sum_b dy[b][o] * x[b][i]
        Tensor<T> dyt({out_features, batch});
        for (int b = 0; b < batch; ++b)
            for (int o = 0; o < out_features; ++o)
                dyt.data[static_cast<std::size_t>(o) * batch + b] =
                    dy.data[static_cast<std::size_t>(b) * out_features + o];
        gemm_nn(dyt.ptr(), input.ptr(), weight.grad.ptr(), out_features, in_features, batch);
        for (int o = 0; o < out_features; ++o) {
            T sum = 0;
            for (int b = 0; b < batch; ++b) sum += dy.data[static_cast<std::size_t>(b) * out_features + o];
            bias.grad.data[o] += sum;
        }
        Tensor<T> dx({batch, in_features});
        gemm_nn(dy.ptr(), weight.value.ptr(), dx.ptr(), batch, in_features, out_features);
        return dx;
    }
};

/// Mean over the spatial extent: [B,C,H,W] -> [B,C].
template <typename T>
struct GlobalAvgPool {
    std::vector<int> input_shape;

    Tensor<T> forward(const Tensor<T>& x) {
        input_shape = x.shape;
        const int batch = x.dim(0), channels = x.dim(1);
        const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
        Tensor<T> y({batch, channels});
        for (int b = 0; b < batch; ++b)
            for (int c = 0; c < channels; ++c) {
                const T* src = x.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
                T sum = 0;
                for (std::size_t i = 0; i < plane; ++i) sum += src[i];
                y.data[static_cast<std::size_t>(b) * channels + c] = sum / static_cast<T>(plane);
            }
        return y;
    }
    Tensor<T> backward(const Tensor<T>& dy) const {
        Tensor<T> dx(input_shape);
        const int batch = dx.dim(0), channels = dx.dim(1);
        const std::size_t plane = static_cast<std::size_t>(dx.dim(2)) * dx.dim(3);
        for (int b = 0; b < batch; ++b)
            for (int c = 0; c < channels; ++c) {
                const T g = dy.data[static_cast<std::size_t>(b) * channels + c] / static_cast<T>(plane);
                T* dst = dx.ptr() + (static_cast<std::size_t>(b) * channels + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) dst[i] = g;
            }
        return dx;
    }
};

} // namespace lodcheck::nn
