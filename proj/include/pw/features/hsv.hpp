#pragma once

#include <algorithm>

namespace pw::features {

struct Hsv {
    double h;  // degrees [0, 360)
    double s;  // [0, 1]
    double v;  // [0, 1]
};

/// Hexcone RGB -> HSV; inputs in [0, 1].
inline Hsv rgb_to_hsv(double r, double g, double b) {
    const double maxc = std::max({r, g, b});
    const double minc = std::min({r, g, b});
    const double delta = maxc - minc;
    Hsv out{0.0, 0.0, maxc};
    if (maxc > 0.0) out.s = delta / maxc;
    if (delta > 0.0) {
        if (maxc == r)
            out.h = 60.0 * ((g - b) / delta);
        else if (maxc == g)
            out.h = 60.0 * (2.0 + (b - r) / delta);
        else
            out.h = 60.0 * (4.0 + (r - g) / delta);
        if (out.h < 0.0) out.h += 360.0;
    }
    return out;
}

}  // namespace pw::features
