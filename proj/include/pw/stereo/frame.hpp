#pragma once

#include <cstdint>
#include <stdexcept>

#include "pw/core/image.hpp"

namespace pw::stereo {

/// Rectified stereo pair; the left view sits behind a horizontal
/// polarizer, the right behind a vertical one.
struct PolarizedStereoFrame {
    ImageU8 left;   // 3-channel RGB
    ImageU8 right;  // 3-channel RGB
    double focal_length = 0.0;  // pixels
    double baseline = 0.0;      // meters
    double camera_height = 0.0; // meters
    double principal_u = 0.0;
    double principal_v = 0.0;
    int frame_id = 0;

    int width() const { return left.width(); }
    int height() const { return left.height(); }

    void validate() const {
        if (!left.same_size(right)) throw std::invalid_argument("stereo views differ in size");
        if (focal_length <= 0) throw std::invalid_argument("focal length must be positive");
        if (baseline <= 0) throw std::invalid_argument("baseline must be positive");
    }
};

/// Splits a side-by-side frame at width/2 into left and right views.
inline void split_side_by_side(const ImageU8& sbs, ImageU8& left, ImageU8& right) {
    const int w = sbs.width() / 2;
    left = ImageU8(w, sbs.height(), sbs.channels());
    right = ImageU8(w, sbs.height(), sbs.channels());
    for (int y = 0; y < sbs.height(); ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < sbs.channels(); ++c) {
                left.at(x, y, c) = sbs.at(x, y, c);
                right.at(x, y, c) = sbs.at(x + w, y, c);
            }
}

struct DisparityMap {
    ImageF values;    // pixels; meaningful only where valid
    ImageU8 valid;    // nonzero = valid

    int width() const { return values.width(); }
    int height() const { return values.height(); }
};

inline ImageU8 to_gray(const ImageU8& rgb) {
    if (rgb.channels() == 1) return rgb;
    ImageU8 gray(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x) {
            const int v = (299 * rgb.at(x, y, 0) + 587 * rgb.at(x, y, 1) +
                           114 * rgb.at(x, y, 2) + 500) / 1000;
            gray.at(x, y) = static_cast<std::uint8_t>(v);
        }
    return gray;
}

/// Fixed-point 1/16-pixel disparity export; invalid pixels map to 0.
inline ImageU16 disparity_to_fixed16(const DisparityMap& disp) {
    ImageU16 out(disp.width(), disp.height(), 1, 0);
    for (int y = 0; y < disp.height(); ++y)
        for (int x = 0; x < disp.width(); ++x)
            if (disp.valid.at(x, y)) {
                const double v = disp.values.at(x, y) * 16.0;
                out.at(x, y) = static_cast<std::uint16_t>(v < 0 ? 0 : (v > 65535 ? 65535 : v + 0.5));
            }
    return out;
}

}  // namespace pw::stereo
