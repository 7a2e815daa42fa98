#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

namespace lodcheck {

inline constexpr int kQualityLevels = 6;
inline constexpr int kVertexBuckets = 4;

/// Retained-vertex fraction per quality level, bucketed by the asset's
/// original vertex count. Buckets read "< thresholds[i]" left to right,
/// the last column covers counts >= thresholds.back().
struct QualityPolicy {
    std::array<std::uint32_t, kVertexBuckets - 1> thresholds{100, 300, 500};
    // ratios[level-1][bucket], each in (0,1], strictly decreasing down a column.
    std::array<std::array<double, kVertexBuckets>, kQualityLevels> ratios{};

    int bucket_for(std::uint32_t original_count) const {
        for (int i = 0; i < kVertexBuckets - 1; ++i)
            if (original_count < thresholds[i]) return i;
        return kVertexBuckets - 1;
    }
};

/// The default reduction table used for the six quality levels.
QualityPolicy default_quality_policy();

/// Throws if ratios leave (0,1], are not strictly decreasing per column,
/// or thresholds are not strictly increasing.
void validate_policy(const QualityPolicy& policy);

/// Vertex budget for decimating an asset of `original_count` vertices to
/// `level` (1..6): round-half-up of count * ratio, clamped to >= 3.
std::uint32_t target_vertex_count(std::uint32_t original_count, int level,
                                  const QualityPolicy& policy);

/// Load a policy from JSON: {"thresholds":[...3], "ratios":[[...4] x6]}.
QualityPolicy load_policy(const std::filesystem::path& path);

} // namespace lodcheck
