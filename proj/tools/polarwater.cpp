#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pw/features/gmm.hpp"
#include "pw/optics/model_curves.hpp"
#include "pw/pipeline/dataset.hpp"
#include "pw/pipeline/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> feature_set;

    void apply(pw::pipeline::PipelineConfig& config) const {
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        if (feature_set) config.feature_set = pw::features::feature_set_from_name(*feature_set);
    }
};

void add_overrides(CLI::App* cmd, CommonOverrides& o) {
    cmd->add_option("--seed", o.seed, "Override config seed");
    cmd->add_option("--threads", o.threads, "Worker threads for per-frame processing");
    cmd->add_option("--feature-set", o.feature_set, "with-azimuth or without-azimuth")
        ->check(CLI::IsMember({"with-azimuth", "without-azimuth"}));
}

pw::pipeline::PipelineConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return {};
    return pw::pipeline::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polarized-stereo water hazard detection"};
    app.require_subcommand(1);

    std::string manifest_path, config_path, models_dir, out_dir, spec_path, detections_dir;
    CommonOverrides overrides;

    auto* synth = app.add_subcommand("synth", "Render a synthetic dataset");
    synth->add_option("--spec", spec_path, "Dataset spec JSON")->required();
    synth->add_option("--out", out_dir, "Output dataset directory")->required();

    auto* train = app.add_subcommand("train", "Train water / not-water models");
    train->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    train->add_option("--config", config_path, "Pipeline config JSON");
    train->add_option("--out", out_dir, "Directory for model files")->required();
    add_overrides(train, overrides);

    auto* detect = app.add_subcommand("detect", "Detect water on the test split");
    detect->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    detect->add_option("--config", config_path, "Pipeline config JSON");
    detect->add_option("--models", models_dir, "Directory with water.json / not_water.json")
        ->required();
    detect->add_option("--out", out_dir, "Detections output directory")->required();
    add_overrides(detect, overrides);

    auto* evalc = app.add_subcommand("eval", "Score detections against ground truth");
    evalc->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    evalc->add_option("--detections", detections_dir, "Detections directory")->required();
    evalc->add_option("--out", out_dir, "Metrics output directory")->required();

    auto* curves = app.add_subcommand("curves", "Emit model curve CSVs");
    curves->add_option("--out", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            const auto spec = pw::pipeline::load_dataset_spec(spec_path);
            const auto manifest = pw::pipeline::generate_dataset(spec, out_dir);
            std::cout << "wrote " << manifest.frames.size() << " frames to " << out_dir << "\n";
        } else if (train->parsed()) {
            auto config = load_config_or_default(config_path);
            overrides.apply(config);
            const auto manifest = pw::pipeline::load_manifest(manifest_path);
            const auto models = pw::pipeline::train_models(manifest, config);
            fs::create_directories(out_dir);
            pw::pipeline::save_models(models, config,
                                      (fs::path(out_dir) / "water.json").string(),
                                      (fs::path(out_dir) / "not_water.json").string());
            std::cout << "trained on " << models.frames_used << " frames ("
                      << models.water_samples << " water / " << models.not_water_samples
                      << " not-water samples)\n";
        } else if (detect->parsed()) {
            auto config = load_config_or_default(config_path);
            overrides.apply(config);
            const auto manifest = pw::pipeline::load_manifest(manifest_path);
            const auto water =
                pw::features::load_gmm((fs::path(models_dir) / "water.json").string());
            const auto not_water =
                pw::features::load_gmm((fs::path(models_dir) / "not_water.json").string());
            const auto summary =
                pw::pipeline::run_detection(manifest, config, water, not_water, out_dir);
            int ok = 0;
            for (const auto& r : summary.frames)
                if (r.ok) ++ok;
            std::cout << "detected on " << ok << "/" << summary.frames.size() << " frames\n";
        } else if (evalc->parsed()) {
            const auto manifest = pw::pipeline::load_manifest(manifest_path);
            const auto result = pw::pipeline::run_eval(manifest, detections_dir, out_dir);
            auto show = [](const std::optional<double>& v) {
                return v ? std::to_string(*v) : std::string("n/a");
            };
            std::cout << "pooled accuracy " << show(result.pooled_metrics.accuracy)
                      << " recall " << show(result.pooled_metrics.recall) << " precision "
                      << show(result.pooled_metrics.precision) << " over "
                      << result.frames_evaluated << " frames\n";
        } else if (curves->parsed()) {
            fs::create_directories(out_dir);
            pw::optics::write_sky_polarization_csv(
                (fs::path(out_dir) / "sky_polarization.csv").string());
            pw::optics::write_water_reflection_csv(
                (fs::path(out_dir) / "water_reflection.csv").string());
            std::cout << "wrote curve CSVs to " << out_dir << "\n";
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        err["command"] = app.get_subcommands().empty() ? "" : app.get_subcommands()[0]->get_name();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
