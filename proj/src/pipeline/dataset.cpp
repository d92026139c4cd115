#include "pw/pipeline/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "pw/core/png_io.hpp"

namespace pw::pipeline {
namespace {

namespace fs = std::filesystem;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t h = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ull;
    h = (h ^ (h >> 27)) * 0x94D049BB133111EBull;
    return h ^ (h >> 31);
}

ImageU8 side_by_side(const ImageU8& left, const ImageU8& right) {
    ImageU8 out(left.width() * 2, left.height(), 3);
    for (int y = 0; y < left.height(); ++y)
        for (int x = 0; x < left.width(); ++x)
            for (int c = 0; c < 3; ++c) {
                out.at(x, y, c) = left.at(x, y, c);
                out.at(x + left.width(), y, c) = right.at(x, y, c);
            }
    return out;
}

std::string numbered(const char* dir, int id) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s/%06d.png", dir, id);
    return buf;
}

/// Random puddle layout for one frame; puddles land inside the camera's
/// ground footprint at their distance.
std::vector<synth::PuddleSpec> random_puddles(const DatasetSpec& spec, std::mt19937_64& rng,
                                              bool allow_empty) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (allow_empty && unit(rng) < spec.empty_frame_fraction) return {};

    std::uniform_int_distribution<int> count(spec.puddle_count_min, spec.puddle_count_max);
    std::uniform_real_distribution<double> dist(spec.distance_min_m, spec.distance_max_m);
    std::uniform_real_distribution<double> radius(spec.radius_min_m, spec.radius_max_m);

    const double half_tan = (spec.scene.width / 2.0) / spec.scene.focal_length;
    std::vector<synth::PuddleSpec> puddles;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        synth::PuddleSpec p;
        p.center_z = dist(rng) + spec.scene.camera_z;
        const double lateral = 0.8 * (p.center_z - spec.scene.camera_z) * half_tan;
        p.center_x = (2.0 * unit(rng) - 1.0) * lateral;
        p.radius_x = radius(rng);
        p.radius_z = radius(rng);
        const double absorption = 0.5 + 0.2 * unit(rng);
        const double particle_share = 0.3 + 0.4 * unit(rng);
        p.column = optics::uniform_column(absorption, particle_share);
        puddles.push_back(p);
    }
    return puddles;
}

}  // namespace

nlohmann::json dataset_spec_to_json(const DatasetSpec& spec) {
    nlohmann::json j;
    j["scene"] = synth::scene_to_json(spec.scene);
    j["mode"] = spec.mode;
    j["frames"] = spec.frames;
    j["advance_m"] = spec.advance_m;
    j["split"] = spec.split;
    j["train_frames"] = spec.train_frames;
    j["test_frames"] = spec.test_frames;
    j["puddle_count_min"] = spec.puddle_count_min;
    j["puddle_count_max"] = spec.puddle_count_max;
    j["empty_frame_fraction"] = spec.empty_frame_fraction;
    j["distance_min_m"] = spec.distance_min_m;
    j["distance_max_m"] = spec.distance_max_m;
    j["radius_min_m"] = spec.radius_min_m;
    j["radius_max_m"] = spec.radius_max_m;
    return j;
}

DatasetSpec dataset_spec_from_json(const nlohmann::json& j) {
    DatasetSpec spec;
    try {
        if (j.contains("scene")) spec.scene = synth::scene_from_json(j["scene"]);
        spec.mode = j.value("mode", spec.mode);
        spec.frames = j.value("frames", spec.frames);
        spec.advance_m = j.value("advance_m", spec.advance_m);
        spec.split = j.value("split", spec.split);
        spec.train_frames = j.value("train_frames", spec.train_frames);
        spec.test_frames = j.value("test_frames", spec.test_frames);
        spec.puddle_count_min = j.value("puddle_count_min", spec.puddle_count_min);
        spec.puddle_count_max = j.value("puddle_count_max", spec.puddle_count_max);
        spec.empty_frame_fraction = j.value("empty_frame_fraction", spec.empty_frame_fraction);
        spec.distance_min_m = j.value("distance_min_m", spec.distance_min_m);
        spec.distance_max_m = j.value("distance_max_m", spec.distance_max_m);
        spec.radius_min_m = j.value("radius_min_m", spec.radius_min_m);
        spec.radius_max_m = j.value("radius_max_m", spec.radius_max_m);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid dataset spec: ") + e.what());
    }
    if (spec.mode != "single" && spec.mode != "sequence" && spec.mode != "random")
        throw std::runtime_error("invalid dataset spec: mode must be single, sequence or random");
    if (spec.mode == "sequence" && spec.frames < 1)
        throw std::runtime_error("invalid dataset spec: frames must be >= 1");
    if (spec.mode == "random" && spec.train_frames + spec.test_frames < 1)
        throw std::runtime_error("invalid dataset spec: train_frames + test_frames must be >= 1");
    return spec;
}

DatasetSpec load_dataset_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return dataset_spec_from_json(j);
}

DatasetManifest generate_dataset(const DatasetSpec& spec, const std::string& out_dir) {
    fs::create_directories(fs::path(out_dir) / "frames");
    fs::create_directories(fs::path(out_dir) / "masks");

    DatasetManifest manifest;
    manifest.camera.focal_px = spec.scene.focal_length;
    manifest.camera.baseline_m = spec.scene.baseline;
    manifest.camera.height_m = spec.scene.camera_height;
    manifest.camera.principal_u = spec.scene.width / 2.0;
    manifest.camera.principal_v = spec.scene.height / 2.0;
    manifest.root = out_dir;

    auto emit = [&](const synth::SyntheticFrame& frame, int id, const std::string& split) {
        const std::string image_rel = numbered("frames", id);
        const std::string mask_rel = numbered("masks", id);
        write_png_rgb8(manifest.resolve(image_rel),
                       side_by_side(frame.frame.left, frame.frame.right));
        write_png_mask1(manifest.resolve(mask_rel), frame.truth_mask);
        manifest.frames.push_back({id, image_rel, mask_rel, split});
    };

    if (spec.mode == "single") {
        emit(synth::render(spec.scene), 0, spec.split);
    } else if (spec.mode == "sequence") {
        const auto frames = synth::render_sequence(spec.scene, spec.frames, spec.advance_m);
        for (int i = 0; i < static_cast<int>(frames.size()); ++i)
            emit(frames[i], i, spec.split);
    } else {
        const int total = spec.train_frames + spec.test_frames;
        for (int i = 0; i < total; ++i) {
            const bool is_train = i < spec.train_frames;
            synth::SceneSpec scene = spec.scene;
            std::mt19937_64 rng(mix_seed(spec.scene.seed, 40000 + static_cast<std::uint64_t>(i)));
            scene.puddles = random_puddles(spec, rng, !is_train);
            scene.seed = mix_seed(spec.scene.seed, 50000 + static_cast<std::uint64_t>(i));
            emit(synth::render(scene), i, is_train ? "train" : "test");
        }
    }

    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    std::ofstream(fs::path(out_dir) / "dataset_spec.json")
        << dataset_spec_to_json(spec).dump(2) << "\n";
    return manifest;
}

}  // namespace pw::pipeline
