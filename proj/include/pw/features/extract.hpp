#pragma once

#include <Eigen/Dense>

#include <string>

#include "pw/features/gmm.hpp"
#include "pw/geom/angle_maps.hpp"
#include "pw/stereo/warp.hpp"

namespace pw::features {

/// Feature layout: left/right saturations, left value, reflection
/// angle, optional azimuth angle.
enum class FeatureSet { WithoutAzimuth, WithAzimuth };

inline std::string feature_set_name(FeatureSet fs) {
    return fs == FeatureSet::WithAzimuth ? "with-azimuth" : "without-azimuth";
}
FeatureSet feature_set_from_name(const std::string& name);
inline int feature_dim(FeatureSet fs) { return fs == FeatureSet::WithAzimuth ? 5 : 4; }

/// Per-pixel feature planes; valid where below the horizon and covered by
/// the warp.
struct FeatureMaps {
    ImageF sat_left, sat_right, value_left, hue_left;
    ImageF theta, psi;
    ImageU8 valid;

    int width() const { return valid.width(); }
    int height() const { return valid.height(); }
};

struct FeatureOptions {
    bool absolute_azimuth = true;  // feed |psi|; sky polarization is
                                   // left-right symmetric enough
    bool include_hue = false;      // off by default, not among the strong features
};

FeatureMaps extract_features(const stereo::WarpedPair& warped, const geom::AngleMaps& angles);

/// Feature vector at a valid pixel.
Eigen::VectorXd feature_vector(const FeatureMaps& maps, int x, int y, FeatureSet fs,
                               const FeatureOptions& opts = {});

struct DetectionMaps {
    ImageF ratio;      // p(x|water) / p(x|not-water)
    ImageU8 mask;      // ratio > threshold, on valid pixels
    ImageU8 valid;
};

/// Likelihood-ratio classification of every valid pixel. Throws when the
/// two models disagree on the feature set.
DetectionMaps classify(const FeatureMaps& maps, const GmmModel& water,
                       const GmmModel& not_water, double threshold = 1.0,
                       const FeatureOptions& opts = {});

/// Ratio map rendered for inspection: exponentiated log-ratio clamped to
/// [0, 255].
ImageU8 ratio_to_gray(const ImageF& ratio, const ImageU8& valid);

}  // namespace pw::features
