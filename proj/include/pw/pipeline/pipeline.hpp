#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pw/eval/metrics.hpp"
#include "pw/features/extract.hpp"
#include "pw/geom/angle_maps.hpp"
#include "pw/pipeline/config.hpp"
#include "pw/pipeline/manifest.hpp"
#include "pw/stereo/warp.hpp"
#include "pw/synth/scene.hpp"

namespace pw::pipeline {

/// Everything steps 1-5 produce for one frame.
struct FrameArtifacts {
    stereo::PolarizedStereoFrame frame;
    stereo::DisparityMap disparity;
    stereo::GroundPlane plane;
    stereo::HorizonLine horizon;
    stereo::WarpedPair warped;
    geom::AngleMaps angles;
    features::FeatureMaps features;
};

stereo::PolarizedStereoFrame load_frame(const DatasetManifest& manifest, const FrameEntry& entry);

/// Disparity, plane fit, horizon, warp, angle maps, features. Empty with
/// a reason when the plane fit fails.
std::optional<FrameArtifacts> run_front_end(const stereo::PolarizedStereoFrame& frame,
                                            const PipelineConfig& config,
                                            std::string* failure_reason = nullptr);

struct TrainedModels {
    features::GmmModel water;
    features::GmmModel not_water;
    int frames_used = 0;
    long long water_samples = 0;
    long long not_water_samples = 0;
};

/// Steps 1-6 over the manifest's train split: pools features under the
/// ground-truth masks and fits both class models.
TrainedModels train_models(const DatasetManifest& manifest, const PipelineConfig& config);

void save_models(const TrainedModels& models, const PipelineConfig& config,
                 const std::string& water_path, const std::string& not_water_path);

struct DetectionSummary {
    struct FrameRecord {
        int id = 0;
        bool ok = false;
        std::string reason;  // when skipped
        stereo::GroundPlane plane;
        double mask_fraction = 0.0;  // detected share of valid pixels
        double elapsed_ms = 0.0;
    };
    std::vector<FrameRecord> frames;
};

/// Step 7 over the manifest's test split; writes per-frame mask, valid
/// mask, ratio map and a summary JSON into `out_dir`.
DetectionSummary run_detection(const DatasetManifest& manifest, const PipelineConfig& config,
                               const features::GmmModel& water,
                               const features::GmmModel& not_water, const std::string& out_dir);

struct EvalResult {
    eval::ConfusionCounts pooled;
    eval::Metrics pooled_metrics;
    eval::Metrics mean_per_frame;  // per-frame averaged variant
    eval::RangeCurve curve;
    int frames_evaluated = 0;
};

/// Compares stored detections with ground truth; writes metrics CSV/JSON
/// and the range-curve CSV into `out_dir`.
EvalResult run_eval(const DatasetManifest& manifest, const std::string& detections_dir,
                    const std::string& out_dir);

/// Detection output paths for a frame id.
std::string mask_path(const std::string& dir, int id);
std::string valid_path(const std::string& dir, int id);
std::string ratio_path(const std::string& dir, int id);

}  // namespace pw::pipeline
