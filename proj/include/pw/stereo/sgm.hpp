#pragma once

#include "pw/stereo/frame.hpp"

namespace pw::stereo {

/// Semi-global matching over census-transform Hamming costs. Census makes
/// the cost invariant to the monotone brightness shift the orthogonal
/// polarizers introduce between the two views.
struct SgmParams {
    int block_radius = 2;      // census window radius (2 -> 5x5)
    int max_disparity = 64;    // search range [0, max_disparity)
    int p1 = 10;               // small-step smoothness penalty
    int p2 = 120;              // large-step smoothness penalty
    int lr_threshold = 1;      // left-right consistency, pixels
    bool eight_paths = false;  // default 4-path aggregation
    bool subpixel = true;      // parabola refinement on aggregated costs
};

/// Disparity of the left view against the right. Pixels failing the
/// left-right consistency check or too close to the border are invalid.
DisparityMap compute_disparity(const ImageU8& left_gray, const ImageU8& right_gray,
                               const SgmParams& params = {});

DisparityMap compute_disparity(const PolarizedStereoFrame& frame,
                               const SgmParams& params = {});

}  // namespace pw::stereo
