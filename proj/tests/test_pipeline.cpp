#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pw/core/png_io.hpp"
#include "pw/pipeline/config.hpp"
#include "pw/pipeline/dataset.hpp"
#include "pw/pipeline/manifest.hpp"
#include "pw/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pw;
using namespace pw::pipeline;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pw_pipeline_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

DatasetSpec small_random_spec() {
    DatasetSpec spec;
    spec.mode = "random";
    spec.train_frames = 6;
    spec.test_frames = 4;
    spec.distance_max_m = 15.0;
    spec.scene.seed = 7;
    return spec;
}

PipelineConfig fast_config() {
    PipelineConfig config;
    config.max_train_samples = 20000;
    config.threads = 2;
    return config;
}

}  // namespace

TEST_CASE("manifest round-trips through JSON") {
    DatasetManifest m;
    m.camera.focal_px = 333.0;
    m.camera.principal_u = 100.0;
    m.frames.push_back({0, "frames/000000.png", "masks/000000.png", "train"});
    m.frames.push_back({1, "frames/000001.png", "", "test"});
    const auto j = manifest_to_json(m);
    const auto back = manifest_from_json(j);
    CHECK(manifest_to_json(back) == j);
    CHECK(back.camera.focal_px == 333.0);
    REQUIRE(back.frames.size() == 2);
    CHECK(back.frames[1].split == "test");
    CHECK(back.split("train").size() == 1);
}

TEST_CASE("config round-trips and validates") {
    PipelineConfig c;
    c.stereo.max_disparity = 48;
    c.threshold = 1.5;
    c.feature_set = features::FeatureSet::WithoutAzimuth;
    const auto j = config_to_json(c);
    const auto back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));

    PipelineConfig other = c;
    other.threshold = 2.0;
    CHECK(config_hash(other) != config_hash(c));

    auto bad = j;
    bad["stereo"]["p1"] = 500;  // p1 must stay below p2
    CHECK_THROWS(config_from_json(bad));
}

TEST_CASE("front end recovers the true plane on a rendered frame") {
    synth::SceneSpec scene;
    scene.puddles.push_back({0.5, 7.0, 1.0, 1.5, optics::uniform_column(0.6)});
    const auto rendered = synth::render(scene);

    std::string reason;
    const auto artifacts = run_front_end(rendered.frame, fast_config(), &reason);
    REQUIRE_MESSAGE(artifacts.has_value(), reason);
    // the semi-global smoothness prior flattens the gentle ground ramp a
    // little, so allow a modest slope bias
    CHECK(std::abs(artifacts->plane.b - rendered.true_plane.b) < 0.15 * rendered.true_plane.b);
    CHECK(std::abs(artifacts->plane.c - rendered.true_plane.c) < 2.5);
    CHECK(std::abs(artifacts->horizon.v_at(160.0) - rendered.true_horizon.v_at(160.0)) < 12.0);
}

TEST_CASE("front end reports failure when no ground is visible") {
    synth::SceneSpec scene;
    scene.camera_pitch = -0.75;  // looking up, ground below the frame
    const auto rendered = synth::render(scene);
    std::string reason;
    const auto artifacts = run_front_end(rendered.frame, fast_config(), &reason);
    CHECK(!artifacts.has_value());
    CHECK(!reason.empty());
}

TEST_CASE("dataset generation, training, detection and evaluation chain") {
    const auto root = fresh_dir("chain");
    const auto manifest = generate_dataset(small_random_spec(), (root / "data").string());
    CHECK(fs::exists(root / "data" / "manifest.json"));
    CHECK(manifest.split("train").size() == 6);
    CHECK(manifest.split("test").size() == 4);

    // train frames always contain water
    for (const auto* entry : manifest.split("train")) {
        const auto mask = read_png8(manifest.resolve(entry->mask));
        long long water = 0;
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                if (mask.at(x, y)) ++water;
        CHECK(water > 0);
    }

    const auto config = fast_config();
    const auto models = train_models(manifest, config);
    CHECK(models.frames_used == 6);
    CHECK(models.water.clusters.size() >= 1);
    CHECK(models.water.feature_set == "with-azimuth");
    CHECK(models.water_samples == models.not_water_samples);

    const auto det_dir = (root / "det").string();
    const auto summary = run_detection(manifest, config, models.water, models.not_water, det_dir);
    REQUIRE(summary.frames.size() == 4);
    for (const auto& f : summary.frames) {
        CHECK(f.ok);
        CHECK(fs::exists(mask_path(det_dir, f.id)));
        CHECK(fs::exists(ratio_path(det_dir, f.id)));
    }

    const auto eval_dir = (root / "eval").string();
    const auto result = run_eval(manifest, det_dir, eval_dir);
    CHECK(result.frames_evaluated == 4);
    CHECK(result.pooled_metrics.accuracy.value() > 0.9);
    CHECK(fs::exists(fs::path(eval_dir) / "metrics.csv"));
    CHECK(fs::exists(fs::path(eval_dir) / "metrics.json"));
    CHECK(fs::exists(fs::path(eval_dir) / "range_curve.csv"));
}

TEST_CASE("training and detection are deterministic") {
    const auto root = fresh_dir("determinism");
    const auto manifest = generate_dataset(small_random_spec(), (root / "data").string());
    const auto config = fast_config();

    const auto m1 = train_models(manifest, config);
    const auto m2 = train_models(manifest, config);
    save_models(m1, config, (root / "w1.json").string(), (root / "n1.json").string());
    save_models(m2, config, (root / "w2.json").string(), (root / "n2.json").string());
    CHECK(slurp(root / "w1.json") == slurp(root / "w2.json"));
    CHECK(slurp(root / "n1.json") == slurp(root / "n2.json"));

    const auto d1 = (root / "d1").string(), d2 = (root / "d2").string();
    run_detection(manifest, config, m1.water, m1.not_water, d1);
    run_detection(manifest, config, m2.water, m2.not_water, d2);
    for (const auto* entry : manifest.split("test")) {
        CHECK(slurp(mask_path(d1, entry->id)) == slurp(mask_path(d2, entry->id)));
        CHECK(slurp(ratio_path(d1, entry->id)) == slurp(ratio_path(d2, entry->id)));
    }
}

TEST_CASE("a wrong-size mask fails training and names the frame") {
    const auto root = fresh_dir("badmask");
    auto manifest = generate_dataset(small_random_spec(), (root / "data").string());
    // shrink the first training mask
    const auto* first = manifest.split("train").front();
    write_png_mask1(manifest.resolve(first->mask), ImageU8(10, 10, 1, 0));
    try {
        train_models(manifest, fast_config());
        FAIL("expected a mask dimension failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(std::to_string(first->id)) != std::string::npos);
    }
}

TEST_CASE("evaluation demands detections for every masked test frame") {
    const auto root = fresh_dir("missing");
    const auto manifest = generate_dataset(small_random_spec(), (root / "data").string());
    const auto config = fast_config();
    const auto models = train_models(manifest, config);
    const auto det_dir = (root / "det").string();
    run_detection(manifest, config, models.water, models.not_water, det_dir);

    const int victim = manifest.split("test").front()->id;
    fs::remove(mask_path(det_dir, victim));
    try {
        run_eval(manifest, det_dir, (root / "eval").string());
        FAIL("expected missing-detection failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(std::to_string(victim)) != std::string::npos);
    }
}

TEST_CASE("single and sequence dataset modes emit the expected layouts") {
    const auto root = fresh_dir("modes");

    DatasetSpec single;
    single.mode = "single";
    single.scene.puddles.push_back({0.0, 6.0, 1.5, 2.0, optics::uniform_column(0.6)});
    const auto m1 = generate_dataset(single, (root / "single").string());
    CHECK(m1.frames.size() == 1);
    CHECK(fs::exists(root / "single" / "frames" / "000000.png"));
    CHECK(fs::exists(root / "single" / "masks" / "000000.png"));

    DatasetSpec seq = single;
    seq.mode = "sequence";
    seq.frames = 5;
    seq.advance_m = 1.0;
    const auto m2 = generate_dataset(seq, (root / "seq").string());
    CHECK(m2.frames.size() == 5);

    // regenerating the same spec is byte-identical
    const auto m3 = generate_dataset(seq, (root / "seq2").string());
    for (size_t i = 0; i < m2.frames.size(); ++i)
        CHECK(slurp(m2.resolve(m2.frames[i].image)) == slurp(m3.resolve(m3.frames[i].image)));
}

TEST_CASE("dataset spec validation") {
    nlohmann::json j;
    j["mode"] = "warp-speed";
    CHECK_THROWS(dataset_spec_from_json(j));
    j["mode"] = "sequence";
    j["frames"] = 0;
    CHECK_THROWS(dataset_spec_from_json(j));
}
