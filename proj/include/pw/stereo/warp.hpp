#pragma once

#include "pw/stereo/frame.hpp"
#include "pw/stereo/ground_plane.hpp"

namespace pw::stereo {

/// Right view resampled into left coordinates via the plane disparity,
/// giving pixel correspondences on the assumed-flat ground.
struct WarpedPair {
    ImageU8 left;
    ImageU8 right_warped;
    ImageU8 coverage;  // nonzero where the warp source was in-bounds

    int width() const { return left.width(); }
    int height() const { return left.height(); }
};

/// For each left pixel below the horizon with plane disparity >= 0,
/// samples the right image at (u - delta, v) with bilinear interpolation.
WarpedPair warp_right_to_left(const PolarizedStereoFrame& frame, const GroundPlane& plane,
                              bool bilinear = true);

}  // namespace pw::stereo
