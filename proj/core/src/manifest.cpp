#include "lodcheck/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "lodcheck/rng.hpp"

namespace lodcheck {

namespace {

nlohmann::json record_json(const ManifestRecord& r) {
    return {{"id", r.id},
            {"asset", r.asset},
            {"kind", r.kind},
            {"label", r.label},
            {"yaw", r.yaw_deg},
            {"elevation", r.elevation_deg},
            {"light", r.light},
            {"background", r.background},
            {"zoom", r.zoom},
            {"ref_path", r.ref_path},
            {"cand_path", r.cand_path},
            {"fold", r.fold}};
}

ManifestRecord record_from_json(const nlohmann::json& j) {
    ManifestRecord r;
    r.id = j.at("id").get<std::string>();
    r.asset = j.at("asset").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.label = j.at("label").get<int>();
    r.yaw_deg = j.at("yaw").get<double>();
    r.elevation_deg = j.at("elevation").get<double>();
    r.light = j.at("light").get<int>();
    r.background = j.at("background").get<int>();
    r.zoom = j.at("zoom").get<double>();
    r.ref_path = j.at("ref_path").get<std::string>();
    r.cand_path = j.at("cand_path").get<std::string>();
    r.fold = j.at("fold").get<int>();
    return r;
}

} // namespace

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    nlohmann::json header{{"schema", "lodcheck-manifest-v1"},
                          {"kind", manifest.kind},
                          {"seed", manifest.seed}};
    nlohmann::json skipped = nlohmann::json::array();
    for (const SkippedAsset& s : manifest.skipped)
        skipped.push_back({{"asset", s.asset}, {"reason", s.reason}});
    header["skipped"] = skipped;
    out << header.dump() << "\n";
    for (const ManifestRecord& r : manifest.records) out << record_json(r).dump() << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    Manifest m;
    m.dir = path.parent_path();

    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed JSON line: " + e.what());
        }
        if (j.contains("schema")) {
            if (j.at("schema").get<std::string>() != "lodcheck-manifest-v1")
                throw std::runtime_error(path.string() + ": unsupported manifest schema");
            m.kind = j.at("kind").get<std::string>();
            m.seed = j.at("seed").get<std::uint64_t>();
            for (const auto& s : j.at("skipped"))
                m.skipped.push_back({s.at("asset").get<std::string>(),
                                     s.at("reason").get<std::string>()});
            continue;
        }
        ManifestRecord r = record_from_json(j);
        if (!seen_ids.insert(r.id).second)
            throw std::runtime_error(path.string() + ": duplicate sample id '" + r.id + "'");
        if (m.kind.empty()) m.kind = r.kind;
        m.records.push_back(std::move(r));
    }
    if (m.records.empty())
        throw std::runtime_error(path.string() + ": manifest has no records");
    return m;
}

int FoldPlan::fold_of(const std::string& asset) const {
    auto it = assignment.find(asset);
    if (it == assignment.end())
        throw std::runtime_error("fold plan has no assignment for asset '" + asset + "'");
    return it->second;
}

FoldPlan make_folds(const Manifest& manifest, int k, std::uint64_t seed) {
    if (k < 2) throw std::runtime_error("make_folds: k must be >= 2");
    std::set<std::string> unique;
    for (const ManifestRecord& r : manifest.records) unique.insert(r.asset);
    std::vector<std::string> assets(unique.begin(), unique.end());
    if (static_cast<int>(assets.size()) < k)
        throw std::runtime_error("make_folds: fewer assets (" + std::to_string(assets.size()) +
                                 ") than folds (" + std::to_string(k) + ")");

    SplitMix64 rng(mix_seed(seed, "folds"));
    for (std::size_t i = assets.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(assets[i - 1], assets[j]);
    }
    FoldPlan plan;
    plan.k = k;
    for (std::size_t i = 0; i < assets.size(); ++i)
        plan.assignment[assets[i]] = static_cast<int>(i % k);
    return plan;
}

void apply_folds(Manifest& manifest, const FoldPlan& plan) {
    for (ManifestRecord& r : manifest.records) r.fold = plan.fold_of(r.asset);
}

} // namespace lodcheck
