#include "lodcheck/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lodcheck {

namespace {

constexpr char kMagic[8] = {'L', 'O', 'D', 'C', 'K', 'P', '0', '1'};

nlohmann::json model_config_json(const nn::ModelConfig& cfg) {
    return {{"in_channels", cfg.in_channels},
            {"base_channels", cfg.base_channels},
            {"stages", cfg.stages},
            {"blocks_per_stage", cfg.blocks_per_stage},
            {"num_classes", cfg.num_classes},
            {"norm", cfg.norm == nn::NormKind::Batch ? "batch" : "group"}};
}

nn::ModelConfig model_config_from_json(const nlohmann::json& j) {
    nn::ModelConfig cfg;
    cfg.in_channels = j.at("in_channels").get<int>();
    cfg.base_channels = j.at("base_channels").get<int>();
    cfg.stages = j.at("stages").get<int>();
    cfg.blocks_per_stage = j.at("blocks_per_stage").get<int>();
    cfg.num_classes = j.at("num_classes").get<int>();
    const std::string norm = j.at("norm").get<std::string>();
    if (norm == "batch") cfg.norm = nn::NormKind::Batch;
    else if (norm == "group") cfg.norm = nn::NormKind::Group;
    else throw std::runtime_error("checkpoint: unknown norm kind '" + norm + "'");
    return cfg;
}

} // namespace

const Tensor<float>* TensorFile::find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return &t;
    return nullptr;
}

void save_tensor_file(const std::filesystem::path& path, const std::string& kind,
                      const std::string& meta_json,
                      const std::vector<std::pair<std::string, const Tensor<float>*>>& tensors) {
    nlohmann::json header;
    header["kind"] = kind;
    header["meta"] = meta_json.empty() ? nlohmann::json::object()
                                       : nlohmann::json::parse(meta_json);
    nlohmann::json tlist = nlohmann::json::array();
    for (const auto& [name, tensor] : tensors)
        tlist.push_back({{"name", name}, {"shape", tensor->shape}});
    header["tensors"] = tlist;
    const std::string hbytes = header.dump();

    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    const std::uint64_t hlen = hbytes.size();
    bool ok = std::fwrite(kMagic, 1, sizeof(kMagic), f) == sizeof(kMagic) &&
              std::fwrite(&hlen, sizeof(hlen), 1, f) == 1 &&
              std::fwrite(hbytes.data(), 1, hbytes.size(), f) == hbytes.size();
    for (const auto& [name, tensor] : tensors) {
        if (!ok) break;
        ok = std::fwrite(tensor->data.data(), sizeof(float), tensor->data.size(), f) ==
             tensor->data.size();
    }
    if (std::fclose(f) != 0) ok = false;
    if (!ok) throw std::runtime_error("write failed: " + path.string());
}

TensorFile load_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(path.string() + ": not a lodcheck tensor file");
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (in.gcount() != sizeof(hlen) || hlen == 0 || hlen > (1u << 26))
        throw std::runtime_error(path.string() + ": corrupt header length");
    std::string hbytes(hlen, '\0');
    in.read(hbytes.data(), static_cast<std::streamsize>(hlen));
    if (static_cast<std::uint64_t>(in.gcount()) != hlen)
        throw std::runtime_error(path.string() + ": truncated header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(hbytes);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": malformed header: " + e.what());
    }

    TensorFile tf;
    tf.kind = header.at("kind").get<std::string>();
    tf.meta_json = header.at("meta").dump();
    for (const auto& entry : header.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
        Tensor<float> t(shape);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != t.data.size() * sizeof(float))
            throw std::runtime_error(path.string() + ": truncated tensor '" + name + "'");
        tf.tensors.emplace_back(name, std::move(t));
    }
    return tf;
}

int num_classes_for_task(const std::string& task) {
    if (task == kTaskBinary) return 2;
    if (task == kTaskMulticlass) return 7;
    throw std::runtime_error("unknown task '" + task + "' (expected binary|multiclass)");
}

void save_checkpoint(nn::ResConvNet<float>& net, const std::string& task,
                     const std::filesystem::path& path) {
    nlohmann::json meta;
    meta["version"] = 1;
    meta["task"] = task;
    meta["model"] = model_config_json(net.cfg);
    std::vector<std::pair<std::string, const Tensor<float>*>> tensors;
    for (const auto& nt : net.named_tensors()) tensors.emplace_back(nt.name, nt.tensor);
    save_tensor_file(path, "lodcheck-checkpoint", meta.dump(), tensors);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    TensorFile tf = load_tensor_file(path);
    if (tf.kind != "lodcheck-checkpoint")
        throw std::runtime_error(path.string() + ": not a checkpoint (kind '" + tf.kind + "')");
    const nlohmann::json meta = nlohmann::json::parse(tf.meta_json);
    if (meta.at("version").get<int>() != 1)
        throw std::runtime_error(path.string() + ": unsupported checkpoint version");

    LoadedCheckpoint out{meta.at("task").get<std::string>(),
                         model_config_from_json(meta.at("model")),
                         nn::ResConvNet<float>()};
    if (out.config.num_classes != num_classes_for_task(out.task))
        throw std::runtime_error(path.string() + ": head size inconsistent with task");
    out.net = nn::ResConvNet<float>(out.config);
    for (const auto& nt : out.net.named_tensors()) {
        const Tensor<float>* stored = tf.find(nt.name);
        if (!stored)
            throw std::runtime_error(path.string() + ": missing tensor '" + nt.name + "'");
        if (stored->shape != nt.tensor->shape)
            throw std::runtime_error(path.string() + ": shape mismatch for '" + nt.name + "' (" +
                                     shape_string(stored->shape) + " vs " +
                                     shape_string(nt.tensor->shape) + ")");
        nt.tensor->data = stored->data;
    }
    return out;
}

LoadedCheckpoint load_checkpoint_for_task(const std::filesystem::path& path,
                                          const std::string& expected_task) {
    LoadedCheckpoint ck = load_checkpoint(path);
    if (ck.task != expected_task)
        throw std::runtime_error(path.string() + ": checkpoint task is '" + ck.task +
                                 "', expected '" + expected_task + "'");
    return ck;
}

} // namespace lodcheck
