#include "lodcheck/quality.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lodcheck {

QualityPolicy default_quality_policy() {
    QualityPolicy p;
    p.thresholds = {100, 300, 500};
    p.ratios = {{
        //  <100   <300   <500   >=500
        {0.98, 0.90, 0.90, 0.50},   // level 1
        {0.92, 0.81, 0.72, 0.25},   // level 2
        {0.87, 0.73, 0.50, 0.13},   // level 3
        {0.81, 0.58, 0.30, 0.075},  // level 4
        {0.76, 0.47, 0.15, 0.045},  // level 5
        {0.70, 0.37, 0.075, 0.027}, // level 6
    }};
    return p;
}

void validate_policy(const QualityPolicy& policy) {
    for (int i = 0; i + 1 < kVertexBuckets - 1; ++i)
        if (policy.thresholds[i] >= policy.thresholds[i + 1])
            throw std::runtime_error("quality policy: thresholds must be strictly increasing");
    for (int level = 0; level < kQualityLevels; ++level)
        for (int b = 0; b < kVertexBuckets; ++b) {
            double r = policy.ratios[level][b];
            if (!(r > 0.0 && r <= 1.0))
                throw std::runtime_error("quality policy: ratio outside (0,1]");
            if (level > 0 && !(r < policy.ratios[level - 1][b]))
                throw std::runtime_error("quality policy: ratios must strictly decrease per column");
        }
}

std::uint32_t target_vertex_count(std::uint32_t original_count, int level,
                                  const QualityPolicy& policy) {
    if (level < 1 || level > kQualityLevels)
        throw std::runtime_error("quality level must be in 1..6, got " + std::to_string(level));
    if (original_count < 3)
        throw std::runtime_error("original vertex count must be >= 3");
    const double ratio = policy.ratios[level - 1][policy.bucket_for(original_count)];
    const double target = std::floor(static_cast<double>(original_count) * ratio + 0.5);
    return static_cast<std::uint32_t>(std::max(3.0, target));
}

QualityPolicy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file: " + path.string());
    nlohmann::json j;
    in >> j;
    QualityPolicy p;
    const auto& th = j.at("thresholds");
    if (th.size() != kVertexBuckets - 1)
        throw std::runtime_error("policy 'thresholds' must have 3 entries");
    for (int i = 0; i < kVertexBuckets - 1; ++i) p.thresholds[i] = th[i].get<std::uint32_t>();
    const auto& rt = j.at("ratios");
    if (rt.size() != kQualityLevels)
        throw std::runtime_error("policy 'ratios' must have 6 rows");
    for (int level = 0; level < kQualityLevels; ++level) {
        if (rt[level].size() != kVertexBuckets)
            throw std::runtime_error("policy 'ratios' rows must have 4 entries");
        for (int b = 0; b < kVertexBuckets; ++b) p.ratios[level][b] = rt[level][b].get<double>();
    }
    validate_policy(p);
    return p;
}

} // namespace lodcheck
