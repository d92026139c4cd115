#include "pw/pipeline/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "pw/core/png_io.hpp"
#include "pw/stereo/sgm.hpp"

namespace pw::pipeline {
namespace {

namespace fs = std::filesystem;

std::string frame_file(const std::string& dir, const char* prefix, int id) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%06d.png", prefix, id);
    return (fs::path(dir) / buf).string();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t h = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ull;
    h = (h ^ (h >> 27)) * 0x94D049BB133111EBull;
    return h ^ (h >> 31);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
/// independent per frame, so ordering does not affect outputs.
void parallel_frames(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

geom::CameraIntrinsics intrinsics_of(const stereo::PolarizedStereoFrame& frame) {
    return {frame.focal_length, frame.principal_u, frame.principal_v};
}

}  // namespace

std::string mask_path(const std::string& dir, int id) { return frame_file(dir, "mask", id); }
std::string valid_path(const std::string& dir, int id) { return frame_file(dir, "valid", id); }
std::string ratio_path(const std::string& dir, int id) { return frame_file(dir, "ratio", id); }

stereo::PolarizedStereoFrame load_frame(const DatasetManifest& manifest, const FrameEntry& entry) {
    const ImageU8 sbs = read_png8(manifest.resolve(entry.image));
    if (sbs.channels() != 3)
        throw std::runtime_error("frame " + std::to_string(entry.id) + ": expected RGB image");
    stereo::PolarizedStereoFrame frame;
    stereo::split_side_by_side(sbs, frame.left, frame.right);
    frame.focal_length = manifest.camera.focal_px;
    frame.baseline = manifest.camera.baseline_m;
    frame.camera_height = manifest.camera.height_m;
    frame.principal_u =
        manifest.camera.principal_u >= 0 ? manifest.camera.principal_u : frame.width() / 2.0;
    frame.principal_v =
        manifest.camera.principal_v >= 0 ? manifest.camera.principal_v : frame.height() / 2.0;
    frame.frame_id = entry.id;
    frame.validate();
    return frame;
}

std::optional<FrameArtifacts> run_front_end(const stereo::PolarizedStereoFrame& frame,
                                            const PipelineConfig& config,
                                            std::string* failure_reason) {
    auto fail = [&](const std::string& why) -> std::optional<FrameArtifacts> {
        if (failure_reason) *failure_reason = why;
        return std::nullopt;
    };

    FrameArtifacts art;
    art.frame = frame;
    art.disparity = stereo::compute_disparity(frame, config.stereo);

    const auto roi = config.roi_triangle(frame.width(), frame.height());
    const auto plane = stereo::fit_ground_plane(art.disparity, roi, config.plane_fit);
    if (!plane) return fail("no ground plane this frame (degenerate or too few points)");
    if (plane->b <= 0) return fail("fitted plane is not a ground plane (b <= 0)");
    art.plane = *plane;

    const auto horizon = stereo::horizon_line(art.plane);
    if (!horizon) return fail("fitted plane has no horizon line");
    art.horizon = *horizon;

    art.warped = stereo::warp_right_to_left(frame, art.plane);
    art.angles = geom::compute_angle_maps(intrinsics_of(frame), art.horizon,
                                          frame.width(), frame.height());
    art.features = features::extract_features(art.warped, art.angles);
    return art;
}

TrainedModels train_models(const DatasetManifest& manifest, const PipelineConfig& config) {
    config.validate();
    const auto train_frames = manifest.split("train");
    std::vector<const FrameEntry*> masked;
    for (const auto* f : train_frames)
        if (!f->mask.empty()) masked.push_back(f);
    if (masked.empty()) throw std::runtime_error("no masked training frames in manifest");

    std::vector<Eigen::VectorXd> water_samples, other_samples;
    int frames_used = 0;

    for (const auto* entry : masked) {
        const auto frame = load_frame(manifest, *entry);
        const ImageU8 mask = read_png8(manifest.resolve(entry->mask));
        if (mask.width() != frame.width() || mask.height() != frame.height())
            throw std::runtime_error("mask dimensions mismatch image for frame " +
                                     std::to_string(entry->id) + " (" + entry->mask + ")");

        std::string reason;
        const auto art = run_front_end(frame, config, &reason);
        if (!art) continue;  // isolated per-frame failure
        ++frames_used;

        std::vector<std::pair<int, int>> water_px, other_px;
        for (int y = 0; y < frame.height(); ++y)
            for (int x = 0; x < frame.width(); ++x) {
                if (!art->features.valid.at(x, y)) continue;
                const std::uint8_t t = mask.at(x, y);
                if (t == eval::kIgnoreLabel) continue;
                (t != 0 ? water_px : other_px).push_back({x, y});
            }

        // All water pixels plus an equal-count random draw of not-water,
        // bounding the class imbalance per frame.
        std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(entry->id)));
        std::shuffle(other_px.begin(), other_px.end(), rng);
        if (other_px.size() > water_px.size()) other_px.resize(water_px.size());

        for (const auto& [x, y] : water_px)
            water_samples.push_back(features::feature_vector(art->features, x, y,
                                                             config.feature_set,
                                                             config.feature_options));
        for (const auto& [x, y] : other_px)
            other_samples.push_back(features::feature_vector(art->features, x, y,
                                                             config.feature_set,
                                                             config.feature_options));
    }
    if (frames_used == 0) throw std::runtime_error("front end failed on every training frame");

    auto subsample = [&](std::vector<Eigen::VectorXd>& v, std::uint64_t salt) {
        if (static_cast<long long>(v.size()) <= config.max_train_samples) return;
        std::mt19937_64 rng(mix_seed(config.seed, salt));
        std::shuffle(v.begin(), v.end(), rng);
        v.resize(config.max_train_samples);
    };
    subsample(water_samples, 9001);
    subsample(other_samples, 9002);

    auto to_matrix = [](const std::vector<Eigen::VectorXd>& v) {
        Eigen::MatrixXd m(v.size(), v.empty() ? 0 : v.front().size());
        for (size_t i = 0; i < v.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = v[i];
        return m;
    };

    features::GmmTrainConfig tc;
    tc.clusters = config.gmm_clusters;
    tc.diagonal_covariance = config.diagonal_covariance;

    TrainedModels out;
    tc.seed = mix_seed(config.seed, 1);
    out.water = features::train_gmm(to_matrix(water_samples), tc).model;
    tc.seed = mix_seed(config.seed, 2);
    out.not_water = features::train_gmm(to_matrix(other_samples), tc).model;
    out.water.feature_set = features::feature_set_name(config.feature_set);
    out.not_water.feature_set = out.water.feature_set;
    out.frames_used = frames_used;
    out.water_samples = static_cast<long long>(water_samples.size());
    out.not_water_samples = static_cast<long long>(other_samples.size());
    return out;
}

void save_models(const TrainedModels& models, const PipelineConfig& config,
                 const std::string& water_path, const std::string& not_water_path) {
    nlohmann::json provenance;
    provenance["config_hash"] = config_hash(config);
    provenance["seed"] = config.seed;
    provenance["frames_used"] = models.frames_used;
    provenance["water_samples"] = models.water_samples;
    provenance["not_water_samples"] = models.not_water_samples;
    features::save_gmm(models.water, water_path, provenance);
    features::save_gmm(models.not_water, not_water_path, provenance);
}

DetectionSummary run_detection(const DatasetManifest& manifest, const PipelineConfig& config,
                               const features::GmmModel& water,
                               const features::GmmModel& not_water,
                               const std::string& out_dir) {
    config.validate();
    if (water.feature_set != features::feature_set_name(config.feature_set))
        throw std::runtime_error("model feature set does not match config");
    fs::create_directories(out_dir);

    auto entries = manifest.split("test");
    if (entries.empty())
        for (const auto& f : manifest.frames) entries.push_back(&f);

    DetectionSummary summary;
    summary.frames.resize(entries.size());

    parallel_frames(static_cast<int>(entries.size()), config.threads, [&](int i) {
        const FrameEntry& entry = *entries[i];
        auto& record = summary.frames[i];
        record.id = entry.id;
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto frame = load_frame(manifest, entry);
            std::string reason;
            const auto art = run_front_end(frame, config, &reason);
            if (!art) {
                record.reason = reason;
                return;
            }
            const auto detection = features::classify(art->features, water, not_water,
                                                      config.threshold, config.feature_options);
            long long valid_count = 0, mask_count = 0;
            for (int y = 0; y < frame.height(); ++y)
                for (int x = 0; x < frame.width(); ++x) {
                    if (detection.valid.at(x, y)) ++valid_count;
                    if (detection.mask.at(x, y)) ++mask_count;
                }
            write_png_mask1(mask_path(out_dir, entry.id), detection.mask);
            write_png_mask1(valid_path(out_dir, entry.id), detection.valid);
            write_png_gray8(ratio_path(out_dir, entry.id),
                            features::ratio_to_gray(detection.ratio, detection.valid));
            record.ok = true;
            record.plane = art->plane;
            record.mask_fraction =
                valid_count > 0 ? static_cast<double>(mask_count) / valid_count : 0.0;
        } catch (const std::exception& e) {
            record.reason = e.what();
        }
        record.elapsed_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    });

    nlohmann::json j;
    j["config_hash"] = config_hash(config);
    for (const auto& r : summary.frames) {
        nlohmann::json jr;
        jr["id"] = r.id;
        jr["ok"] = r.ok;
        if (!r.ok) jr["reason"] = r.reason;
        jr["plane"] = {{"a", r.plane.a},
                       {"b", r.plane.b},
                       {"c", r.plane.c},
                       {"inlier_fraction", r.plane.inlier_fraction}};
        jr["mask_fraction"] = r.mask_fraction;
        jr["elapsed_ms"] = r.elapsed_ms;
        j["frames"].push_back(jr);
    }
    std::ofstream out(fs::path(out_dir) / "summary.json");
    out << j.dump(2) << "\n";
    return summary;
}

EvalResult run_eval(const DatasetManifest& manifest, const std::string& detections_dir,
                    const std::string& out_dir) {
    fs::create_directories(out_dir);

    nlohmann::json summary;
    {
        std::ifstream in(fs::path(detections_dir) / "summary.json");
        if (!in) throw std::runtime_error("missing detection summary in " + detections_dir);
        in >> summary;
    }
    std::map<int, stereo::GroundPlane> planes;
    std::map<int, bool> frame_ok;
    for (const auto& jr : summary.at("frames")) {
        stereo::GroundPlane p;
        p.a = jr["plane"]["a"].get<double>();
        p.b = jr["plane"]["b"].get<double>();
        p.c = jr["plane"]["c"].get<double>();
        planes[jr["id"].get<int>()] = p;
        frame_ok[jr["id"].get<int>()] = jr["ok"].get<bool>();
    }

    auto entries = manifest.split("test");
    if (entries.empty())
        for (const auto& f : manifest.frames) entries.push_back(&f);

    std::vector<const FrameEntry*> masked;
    std::vector<std::string> missing;
    for (const auto* e : entries) {
        if (e->mask.empty()) continue;
        if (!frame_ok.count(e->id) || !frame_ok[e->id]) continue;  // skipped frames are logged
        if (!fs::exists(mask_path(detections_dir, e->id)) ||
            !fs::exists(valid_path(detections_dir, e->id)))
            missing.push_back(std::to_string(e->id));
        else
            masked.push_back(e);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw std::runtime_error("missing detections for masked frames: " + list);
    }
    if (masked.empty()) throw std::runtime_error("no masked test frames with detections");

    EvalResult result;
    std::vector<ImageU8> preds, truths, valids;
    std::vector<eval::FrameResult> frame_results;
    std::ofstream csv(fs::path(out_dir) / "metrics.csv");
    csv << "frame_id,tp,fp,tn,fn,accuracy,recall,precision\n";
    csv.precision(10);

    double acc_sum = 0, rec_sum = 0, prec_sum = 0;
    int acc_n = 0, rec_n = 0, prec_n = 0;

    preds.reserve(masked.size());
    truths.reserve(masked.size());
    valids.reserve(masked.size());
    for (const auto* e : masked) {
        preds.push_back(read_png8(mask_path(detections_dir, e->id)));
        truths.push_back(read_png8(manifest.resolve(e->mask)));
        valids.push_back(read_png8(valid_path(detections_dir, e->id)));
        const auto c = eval::confusion(preds.back(), truths.back(), valids.back());
        result.pooled += c;
        csv << e->id << ',' << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn;
        if (c.total() > 0) {
            const auto m = eval::metrics(c);
            auto put = [&](const std::optional<double>& v, double& sum, int& n) {
                csv << ',';
                if (v) {
                    csv << *v;
                    sum += *v;
                    ++n;
                }
            };
            put(m.accuracy, acc_sum, acc_n);
            put(m.recall, rec_sum, rec_n);
            put(m.precision, prec_sum, prec_n);
        } else {
            csv << ",,,";
        }
        csv << '\n';
        frame_results.push_back({&preds.back(), &truths.back(), &valids.back(),
                                 planes[e->id], manifest.camera.focal_px,
                                 manifest.camera.baseline_m});
        ++result.frames_evaluated;
    }

    result.pooled_metrics = eval::metrics(result.pooled);
    if (acc_n) result.mean_per_frame.accuracy = acc_sum / acc_n;
    if (rec_n) result.mean_per_frame.recall = rec_sum / rec_n;
    if (prec_n) result.mean_per_frame.precision = prec_sum / prec_n;
    result.curve = eval::range_curve(frame_results);

    // Pooled row last, then the JSON summary and the range curve.
    csv << "pooled," << result.pooled.tp << ',' << result.pooled.fp << ','
        << result.pooled.tn << ',' << result.pooled.fn;
    auto put_opt = [&](std::ostream& os, const std::optional<double>& v) {
        os << ',';
        if (v) os << *v;
    };
    put_opt(csv, result.pooled_metrics.accuracy);
    put_opt(csv, result.pooled_metrics.recall);
    put_opt(csv, result.pooled_metrics.precision);
    csv << '\n';

    nlohmann::json j;
    j["frames_evaluated"] = result.frames_evaluated;
    j["pooled"] = {{"tp", result.pooled.tp},
                   {"fp", result.pooled.fp},
                   {"tn", result.pooled.tn},
                   {"fn", result.pooled.fn}};
    auto opt_json = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    j["pooled_metrics"] = {{"accuracy", opt_json(result.pooled_metrics.accuracy)},
                           {"recall", opt_json(result.pooled_metrics.recall)},
                           {"precision", opt_json(result.pooled_metrics.precision)}};
    j["mean_per_frame"] = {{"accuracy", opt_json(result.mean_per_frame.accuracy)},
                           {"recall", opt_json(result.mean_per_frame.recall)},
                           {"precision", opt_json(result.mean_per_frame.precision)}};
    std::ofstream(fs::path(out_dir) / "metrics.json") << j.dump(2) << "\n";

    std::ofstream curve_csv(fs::path(out_dir) / "range_curve.csv");
    curve_csv << "bin_low_m,bin_high_m,bin_center_m,rate,support\n";
    curve_csv.precision(10);
    for (size_t b = 0; b + 1 < result.curve.bin_edges.size(); ++b) {
        curve_csv << result.curve.bin_edges[b] << ',' << result.curve.bin_edges[b + 1] << ','
                  << result.curve.bin_center(b) << ',';
        if (result.curve.rates[b]) curve_csv << *result.curve.rates[b];
        curve_csv << ',' << result.curve.support[b] << '\n';
    }
    return result;
}

}  // namespace pw::pipeline
