#pragma once

#include <algorithm>
#include <cstddef>

namespace lodcheck {

// Small blocked GEMM kernels used by the convolution and linear layers.
// Row-major throughout. Written so every output element is accumulated by
// exactly one sequential loop, which keeps results bit-reproducible for a
// given binary regardless of problem size.

namespace detail {
inline constexpr int kRowTile = 4;
inline constexpr int kColTile = 64;
inline constexpr int kDepthBlock = 256;
}

/// C[M x N] = A[M x K] * B[K x N]
template <typename T>
void gemm_nn(const T* A, const T* B, T* C, int M, int N, int K) {
    using namespace detail;
    std::fill(C, C + static_cast<std::size_t>(M) * N, T(0));
    for (int k0 = 0; k0 < K; k0 += kDepthBlock) {
        const int k1 = std::min(K, k0 + kDepthBlock);
        for (int i0 = 0; i0 < M; i0 += kRowTile) {
            const int i1 = std::min(M, i0 + kRowTile);
            for (int j0 = 0; j0 < N; j0 += kColTile) {
                const int j1 = std::min(N, j0 + kColTile);
                const int jn = j1 - j0;
                if (i1 - i0 == kRowTile && jn == kColTile) {
                    // Register-tiled hot path: 4 rows x 64 columns.
                    T acc[kRowTile][kColTile];
                    for (int r = 0; r < kRowTile; ++r) {
                        T* crow = C + static_cast<std::size_t>(i0 + r) * N + j0;
                        for (int c = 0; c < kColTile; ++c) acc[r][c] = crow[c];
                    }
                    for (int k = k0; k < k1; ++k) {
                        const T* brow = B + static_cast<std::size_t>(k) * N + j0;
                        const T a0 = A[static_cast<std::size_t>(i0 + 0) * K + k];
                        const T a1 = A[static_cast<std::size_t>(i0 + 1) * K + k];
                        const T a2 = A[static_cast<std::size_t>(i0 + 2) * K + k];
                        const T a3 = A[static_cast<std::size_t>(i0 + 3) * K + k];
                        for (int c = 0; c < kColTile; ++c) {
                            const T b = brow[c];
                            acc[0][c] += a0 * b;
                            acc[1][c] += a1 * b;
                            acc[2][c] += a2 * b;
                            acc[3][c] += a3 * b;
                        }
                    }
                    for (int r = 0; r < kRowTile; ++r) {
                        T* crow = C + static_cast<std::size_t>(i0 + r) * N + j0;
                        for (int c = 0; c < kColTile; ++c) crow[c] = acc[r][c];
                    }
                } else {
                    for (int i = i0; i < i1; ++i) {
                        T* crow = C + static_cast<std::size_t>(i) * N;
                        for (int k = k0; k < k1; ++k) {
                            const T a = A[static_cast<std::size_t>(i) * K + k];
                            const T* brow = B + static_cast<std::size_t>(k) * N;
                            for (int j = j0; j < j1; ++j) crow[j] += a * brow[j];
                        }
                    }
                }
            }
        }
    }
}

/// C[M x N] = A[M x K] * B[N x K]^T  (rows of A dotted with rows of B)
template <typename T>
void gemm_nt(const T* A, const T* B, T* C, int M, int N, int K) {
    constexpr int kUnroll = 8;
    for (int i = 0; i < M; ++i) {
        const T* arow = A + static_cast<std::size_t>(i) * K;
        T* crow = C + static_cast<std::size_t>(i) * N;
        for (int j = 0; j < N; ++j) {
            const T* brow = B + static_cast<std::size_t>(j) * K;
            T lanes[kUnroll] = {};
            int k = 0;
            for (; k + kUnroll <= K; k += kUnroll)
                for (int u = 0; u < kUnroll; ++u) lanes[u] += arow[k + u] * brow[k + u];
            T sum = 0;
            for (int u = 0; u < kUnroll; ++u) sum += lanes[u];
            for (; k < K; ++k) sum += arow[k] * brow[k];
            crow[j] = sum;
        }
    }
}

} // namespace lodcheck
