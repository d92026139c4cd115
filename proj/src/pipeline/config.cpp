#include "pw/pipeline/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pw::pipeline {

stereo::RoiTriangle PipelineConfig::roi_triangle(int width, int height) const {
    const double v_horizon = roi.horizon_prior * height;
    return {{width / 2.0, v_horizon + roi.apex_drop * height},
            {roi.base_inset * width, height - 1.0},
            {(1.0 - roi.base_inset) * width, height - 1.0}};
}

void PipelineConfig::validate() const {
    if (stereo.max_disparity < 1) throw std::runtime_error("config: max_disparity must be >= 1");
    if (stereo.p1 >= stereo.p2) throw std::runtime_error("config: need p1 < p2");
    if (gmm_clusters < 1) throw std::runtime_error("config: gmm_clusters must be >= 1");
    if (threshold < 0) throw std::runtime_error("config: threshold must be >= 0");
    if (plane_fit.cauchy_scale <= 0) throw std::runtime_error("config: cauchy_scale must be > 0");
    if (threads < 1) throw std::runtime_error("config: threads must be >= 1");
    if (roi.horizon_prior < 0 || roi.horizon_prior > 1 || roi.apex_drop < 0 ||
        roi.base_inset < 0 || roi.base_inset >= 0.5)
        throw std::runtime_error("config: roi parameters out of range");
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["stereo"] = {{"block_radius", c.stereo.block_radius},
                   {"max_disparity", c.stereo.max_disparity},
                   {"p1", c.stereo.p1},
                   {"p2", c.stereo.p2},
                   {"lr_threshold", c.stereo.lr_threshold},
                   {"eight_paths", c.stereo.eight_paths},
                   {"subpixel", c.stereo.subpixel}};
    j["roi"] = {{"horizon_prior", c.roi.horizon_prior},
                {"apex_drop", c.roi.apex_drop},
                {"base_inset", c.roi.base_inset}};
    j["plane_fit"] = {{"cauchy_scale", c.plane_fit.cauchy_scale},
                      {"max_iterations", c.plane_fit.max_iterations},
                      {"tolerance", c.plane_fit.tolerance},
                      {"inlier_threshold", c.plane_fit.inlier_threshold}};
    j["gmm_clusters"] = c.gmm_clusters;
    j["max_train_samples"] = c.max_train_samples;
    j["feature_set"] = features::feature_set_name(c.feature_set);
    j["absolute_azimuth"] = c.feature_options.absolute_azimuth;
    j["include_hue"] = c.feature_options.include_hue;
    j["diagonal_covariance"] = c.diagonal_covariance;
    j["threshold"] = c.threshold;
    j["false_alarm_budget"] = c.false_alarm_budget;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        if (j.contains("stereo")) {
            const auto& s = j["stereo"];
            c.stereo.block_radius = s.value("block_radius", c.stereo.block_radius);
            c.stereo.max_disparity = s.value("max_disparity", c.stereo.max_disparity);
            c.stereo.p1 = s.value("p1", c.stereo.p1);
            c.stereo.p2 = s.value("p2", c.stereo.p2);
            c.stereo.lr_threshold = s.value("lr_threshold", c.stereo.lr_threshold);
            c.stereo.eight_paths = s.value("eight_paths", c.stereo.eight_paths);
            c.stereo.subpixel = s.value("subpixel", c.stereo.subpixel);
        }
        if (j.contains("roi")) {
            const auto& r = j["roi"];
            c.roi.horizon_prior = r.value("horizon_prior", c.roi.horizon_prior);
            c.roi.apex_drop = r.value("apex_drop", c.roi.apex_drop);
            c.roi.base_inset = r.value("base_inset", c.roi.base_inset);
        }
        if (j.contains("plane_fit")) {
            const auto& p = j["plane_fit"];
            c.plane_fit.cauchy_scale = p.value("cauchy_scale", c.plane_fit.cauchy_scale);
            c.plane_fit.max_iterations = p.value("max_iterations", c.plane_fit.max_iterations);
            c.plane_fit.tolerance = p.value("tolerance", c.plane_fit.tolerance);
            c.plane_fit.inlier_threshold = p.value("inlier_threshold", c.plane_fit.inlier_threshold);
        }
        c.gmm_clusters = j.value("gmm_clusters", c.gmm_clusters);
        c.max_train_samples = j.value("max_train_samples", c.max_train_samples);
        if (j.contains("feature_set"))
            c.feature_set = features::feature_set_from_name(j["feature_set"].get<std::string>());
        c.feature_options.absolute_azimuth =
            j.value("absolute_azimuth", c.feature_options.absolute_azimuth);
        c.feature_options.include_hue = j.value("include_hue", c.feature_options.include_hue);
        c.diagonal_covariance = j.value("diagonal_covariance", c.diagonal_covariance);
        c.threshold = j.value("threshold", c.threshold);
        c.false_alarm_budget = j.value("false_alarm_budget", c.false_alarm_budget);
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

void save_config(const PipelineConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << config_to_json(c).dump(2) << "\n";
}

std::string config_hash(const PipelineConfig& c) {
    const std::string s = config_to_json(c).dump();
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace pw::pipeline
