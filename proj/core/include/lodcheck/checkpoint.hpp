#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lodcheck/model.hpp"

namespace lodcheck {

/// Container format shared by checkpoints and standalone tensor files:
/// magic "LODCKP01", little-endian u64 JSON header length, JSON header
/// {kind, meta, tensors:[{name, shape}]}, then the raw float32 blobs in
/// header order. See README for the full layout.
struct TensorFile {
    std::string kind;
    std::string meta_json;
    std::vector<std::pair<std::string, Tensor<float>>> tensors;

    const Tensor<float>* find(const std::string& name) const;
};

void save_tensor_file(const std::filesystem::path& path, const std::string& kind,
                      const std::string& meta_json,
                      const std::vector<std::pair<std::string, const Tensor<float>*>>& tensors);

/// Throws on bad magic, version, truncation, or malformed headers.
TensorFile load_tensor_file(const std::filesystem::path& path);

inline constexpr const char* kTaskBinary = "binary";
inline constexpr const char* kTaskMulticlass = "multiclass";

/// Number of classifier outputs for a task: 2 for binary, 7 for multiclass
/// (quality level 0 plus 1..6).
int num_classes_for_task(const std::string& task);

void save_checkpoint(nn::ResConvNet<float>& net, const std::string& task,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
    std::string task;
    nn::ModelConfig config;
    nn::ResConvNet<float> net;
};

/// Rebuilds the architecture from the stored hyperparameters and restores
/// every weight and running statistic. Throws on shape or schema mismatch.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Loads a checkpoint and asserts it was trained for `expected_task`.
LoadedCheckpoint load_checkpoint_for_task(const std::filesystem::path& path,
                                          const std::string& expected_task);

} // namespace lodcheck
