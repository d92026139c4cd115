#include "pw/stereo/warp.hpp"

#include <cmath>

namespace pw::stereo {

WarpedPair warp_right_to_left(const PolarizedStereoFrame& frame, const GroundPlane& plane,
                              bool bilinear_mode) {
    frame.validate();
    const int w = frame.width();
    const int h = frame.height();
    const int ch = frame.left.channels();

    WarpedPair out;
    out.left = frame.left;
    out.right_warped = ImageU8(w, h, ch, 0);
    out.coverage = ImageU8(w, h, 1, 0);

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double delta = plane.disparity_at(x, y);
            if (delta < 0.0) continue;  // on/above horizon
            const double src_x = x - delta;
            if (src_x < 0.0 || src_x > w - 1.0) continue;
            if (bilinear_mode) {
                for (int c = 0; c < ch; ++c) {
                    const double v = bilinear(frame.right, src_x, y, c);
                    out.right_warped.at(x, y, c) =
                        static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v + 0.5));
                }
            } else {
                const int sx = static_cast<int>(std::lround(src_x));
                for (int c = 0; c < ch; ++c)
                    out.right_warped.at(x, y, c) = frame.right.at(sx, y, c);
            }
            out.coverage.at(x, y) = 1;
        }
    return out;
}

}  // namespace pw::stereo
