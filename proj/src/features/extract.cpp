#include "pw/features/extract.hpp"

#include <cmath>
#include <stdexcept>

#include "pw/features/hsv.hpp"

namespace pw::features {

FeatureSet feature_set_from_name(const std::string& name) {
    if (name == "with-azimuth") return FeatureSet::WithAzimuth;
    if (name == "without-azimuth") return FeatureSet::WithoutAzimuth;
    throw std::invalid_argument("unknown feature set: " + name);
}

FeatureMaps extract_features(const stereo::WarpedPair& warped, const geom::AngleMaps& angles) {
    const int w = warped.width();
    const int h = warped.height();
    if (w != angles.width() || h != angles.height())
        throw std::invalid_argument("warped pair and angle maps differ in size");

    FeatureMaps maps;
    maps.sat_left = ImageF(w, h, 1, 0.0f);
    maps.sat_right = ImageF(w, h, 1, 0.0f);
    maps.value_left = ImageF(w, h, 1, 0.0f);
    maps.hue_left = ImageF(w, h, 1, 0.0f);
    maps.theta = angles.theta;
    maps.psi = angles.psi;
    maps.valid = ImageU8(w, h, 1, 0);

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!angles.below_horizon.at(x, y) || !warped.coverage.at(x, y)) continue;
            const Hsv left = rgb_to_hsv(warped.left.at(x, y, 0) / 255.0,
                                        warped.left.at(x, y, 1) / 255.0,
                                        warped.left.at(x, y, 2) / 255.0);
            const Hsv right = rgb_to_hsv(warped.right_warped.at(x, y, 0) / 255.0,
                                         warped.right_warped.at(x, y, 1) / 255.0,
                                         warped.right_warped.at(x, y, 2) / 255.0);
            maps.sat_left.at(x, y) = static_cast<float>(left.s);
            maps.sat_right.at(x, y) = static_cast<float>(right.s);
            maps.value_left.at(x, y) = static_cast<float>(left.v);
            maps.hue_left.at(x, y) = static_cast<float>(left.h / 360.0);
            maps.valid.at(x, y) = 1;
        }
    return maps;
}

Eigen::VectorXd feature_vector(const FeatureMaps& maps, int x, int y, FeatureSet fs,
                               const FeatureOptions& opts) {
    const int base = feature_dim(fs);
    Eigen::VectorXd v(base + (opts.include_hue ? 1 : 0));
    v[0] = maps.sat_left.at(x, y);
    v[1] = maps.sat_right.at(x, y);
    v[2] = maps.value_left.at(x, y);
    v[3] = maps.theta.at(x, y);
    if (fs == FeatureSet::WithAzimuth) {
        const double psi = maps.psi.at(x, y);
        v[4] = opts.absolute_azimuth ? std::abs(psi) : psi;
    }
    if (opts.include_hue) v[v.size() - 1] = maps.hue_left.at(x, y);
    return v;
}

DetectionMaps classify(const FeatureMaps& maps, const GmmModel& water,
                       const GmmModel& not_water, double threshold,
                       const FeatureOptions& opts) {
    if (water.feature_set != not_water.feature_set)
        throw std::invalid_argument("water and not-water models use different feature sets");
    const FeatureSet fs = feature_set_from_name(water.feature_set);
    const GmmDensity water_density(water);
    const GmmDensity other_density(not_water);

    const int w = maps.width();
    const int h = maps.height();
    DetectionMaps out;
    out.ratio = ImageF(w, h, 1, 0.0f);
    out.mask = ImageU8(w, h, 1, 0);
    out.valid = maps.valid;

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!maps.valid.at(x, y)) continue;
            const Eigen::VectorXd v = feature_vector(maps, x, y, fs, opts);
            const double log_ratio = water_density.log_density(v) - other_density.log_density(v);
            out.ratio.at(x, y) = static_cast<float>(std::exp(log_ratio));
            if (out.ratio.at(x, y) > threshold) out.mask.at(x, y) = 255;
        }
    return out;
}

ImageU8 ratio_to_gray(const ImageF& ratio, const ImageU8& valid) {
    ImageU8 out(ratio.width(), ratio.height(), 1, 0);
    for (int y = 0; y < ratio.height(); ++y)
        for (int x = 0; x < ratio.width(); ++x)
            if (valid.at(x, y)) {
                const double v = ratio.at(x, y);
                out.at(x, y) = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v + 0.5));
            }
    return out;
}

}  // namespace pw::features
