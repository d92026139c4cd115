#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pw/features/extract.hpp"
#include "pw/stereo/ground_plane.hpp"
#include "pw/stereo/sgm.hpp"

namespace pw::pipeline {

struct RoiConfig {
    double horizon_prior = 0.5;  // assumed horizon row as a fraction of height
    double apex_drop = 0.15;     // apex sits this fraction below the horizon
    double base_inset = 0.1;     // base corners at inset*w and (1-inset)*w
};

struct PipelineConfig {
    stereo::SgmParams stereo;
    RoiConfig roi;
    stereo::PlaneFitParams plane_fit;
    int gmm_clusters = 5;
    long long max_train_samples = 50000;  // per class, subsampled past this
    features::FeatureSet feature_set = features::FeatureSet::WithAzimuth;
    features::FeatureOptions feature_options;
    bool diagonal_covariance = false;
    double threshold = 1.0;
    double false_alarm_budget = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;

    stereo::RoiTriangle roi_triangle(int width, int height) const;
    void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& c);
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& c, const std::string& path);

/// Stable short hash of the serialized config, recorded in model files.
std::string config_hash(const PipelineConfig& c);

}  // namespace pw::pipeline
