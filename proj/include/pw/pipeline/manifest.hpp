#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pw::pipeline {

/// Camera constants are dataset properties and live here, not in the
/// pipeline config. Negative principal point means "image center".
struct CameraConstants {
    double focal_px = 720.0;
    double baseline_m = 0.12;
    double height_m = 1.77;
    double principal_u = -1.0;
    double principal_v = -1.0;
};

struct FrameEntry {
    int id = 0;
    std::string image;  // side-by-side PNG, split at width/2
    std::string mask;   // optional ground truth
    std::string split;  // "train", "test" or ""
};

struct DatasetManifest {
    int version = 1;
    CameraConstants camera;
    std::string polarizer_left = "horizontal";
    std::string polarizer_right = "vertical";
    std::vector<FrameEntry> frames;
    std::string root;  // directory the manifest was loaded from; not serialized

    std::vector<const FrameEntry*> split(const std::string& name) const;
    std::string resolve(const std::string& relative) const;
};

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

}  // namespace pw::pipeline
