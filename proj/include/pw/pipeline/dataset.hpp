#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pw/pipeline/manifest.hpp"
#include "pw/synth/scene.hpp"

namespace pw::pipeline {

/// On-disk dataset recipe driving the synth command. Three modes:
///  - single:   one frame from the scene as written
///  - sequence: camera advances between frames, puddles fixed in world
///  - random:   per-frame random puddle layouts split into train/test;
///              train frames always contain puddles
struct DatasetSpec {
    synth::SceneSpec scene;
    std::string mode = "single";

    // sequence
    int frames = 1;
    double advance_m = 1.0;
    std::string split = "test";

    // random
    int train_frames = 0;
    int test_frames = 0;
    int puddle_count_min = 1;
    int puddle_count_max = 3;
    double empty_frame_fraction = 0.15;  // test frames only
    double distance_min_m = 3.0;
    double distance_max_m = 40.0;
    double radius_min_m = 0.5;
    double radius_max_m = 2.5;
};

nlohmann::json dataset_spec_to_json(const DatasetSpec& spec);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j);
DatasetSpec load_dataset_spec(const std::string& path);

/// Renders the dataset into `out_dir` (frames/, masks/, manifest.json)
/// in the same layout the train/detect/eval commands consume.
DatasetManifest generate_dataset(const DatasetSpec& spec, const std::string& out_dir);

}  // namespace pw::pipeline
