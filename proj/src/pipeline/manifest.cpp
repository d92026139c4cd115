#include "pw/pipeline/manifest.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pw::pipeline {

std::vector<const FrameEntry*> DatasetManifest::split(const std::string& name) const {
    std::vector<const FrameEntry*> out;
    for (const auto& f : frames)
        if (f.split == name) out.push_back(&f);
    return out;
}

std::string DatasetManifest::resolve(const std::string& relative) const {
    const std::filesystem::path p(relative);
    if (p.is_absolute() || root.empty()) return relative;
    return (std::filesystem::path(root) / p).string();
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["camera"] = {{"focal_px", m.camera.focal_px},
                   {"baseline_m", m.camera.baseline_m},
                   {"height_m", m.camera.height_m},
                   {"principal_u", m.camera.principal_u},
                   {"principal_v", m.camera.principal_v}};
    j["polarizers"] = {{"left", m.polarizer_left}, {"right", m.polarizer_right}};
    j["frames"] = nlohmann::json::array();
    for (const auto& f : m.frames) {
        nlohmann::json jf{{"id", f.id}, {"image", f.image}};
        if (!f.mask.empty()) jf["mask"] = f.mask;
        if (!f.split.empty()) jf["split"] = f.split;
        j["frames"].push_back(jf);
    }
    return j;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    try {
        m.version = j.value("version", 1);
        const auto& cam = j.at("camera");
        m.camera.focal_px = cam.at("focal_px").get<double>();
        m.camera.baseline_m = cam.at("baseline_m").get<double>();
        m.camera.height_m = cam.at("height_m").get<double>();
        m.camera.principal_u = cam.value("principal_u", -1.0);
        m.camera.principal_v = cam.value("principal_v", -1.0);
        if (j.contains("polarizers")) {
            m.polarizer_left = j["polarizers"].value("left", m.polarizer_left);
            m.polarizer_right = j["polarizers"].value("right", m.polarizer_right);
        }
        for (const auto& jf : j.at("frames")) {
            FrameEntry f;
            f.id = jf.at("id").get<int>();
            f.image = jf.at("image").get<std::string>();
            f.mask = jf.value("mask", "");
            f.split = jf.value("split", "");
            m.frames.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid manifest: ") + e.what());
    }
    return m;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    DatasetManifest m = manifest_from_json(j);
    m.root = std::filesystem::path(path).parent_path().string();
    return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace pw::pipeline
