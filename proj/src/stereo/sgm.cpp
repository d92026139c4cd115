#include "pw/stereo/sgm.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

namespace pw::stereo {
namespace {

using std::uint16_t;
using std::uint64_t;
using std::uint8_t;

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

/// Census transform with replicated borders; up to radius 3 (48 bits).
std::vector<uint64_t> census_transform(const ImageU8& img, int radius) {
    const int w = img.width();
    const int h = img.height();
    std::vector<uint64_t> census(static_cast<size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const uint8_t center = img.at(x, y);
            uint64_t bits = 0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const uint8_t n = img.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1));
                    bits = (bits << 1) | (n < center ? 1u : 0u);
                }
            census[static_cast<size_t>(y) * w + x] = bits;
        }
    return census;
}

struct PathDir {
    int dx, dy;
};

/// One-direction scanline optimization accumulated into `sum`.
void aggregate_path(const std::vector<uint8_t>& cost, int w, int h, int d_count,
                    PathDir dir, int p1, int p2, std::vector<uint16_t>& sum) {
    const uint16_t kInf = std::numeric_limits<uint16_t>::max() / 2;
    std::vector<uint16_t> prev_row, cur_row;
    const bool horizontal = dir.dy == 0;
    if (!horizontal) {
        prev_row.assign(static_cast<size_t>(w) * d_count, 0);
        cur_row.assign(static_cast<size_t>(w) * d_count, 0);
    }
    std::vector<uint16_t> lp(d_count);

    const int y0 = dir.dy >= 0 ? 0 : h - 1;
    const int y_step = dir.dy >= 0 ? 1 : -1;
    const int x0 = dir.dx >= 0 ? 0 : w - 1;
    const int x_step = dir.dx >= 0 ? 1 : -1;

    for (int yi = 0, y = y0; yi < h; ++yi, y += y_step) {
        for (int xi = 0, x = x0; xi < w; ++xi, x += x_step) {
            const size_t pix = static_cast<size_t>(y) * w + x;
            const uint8_t* c = &cost[pix * d_count];
            uint16_t* out = horizontal ? lp.data() : &cur_row[static_cast<size_t>(x) * d_count];

            const int px = x - dir.dx;
            const int py = y - dir.dy;
            const bool has_prev = px >= 0 && px < w && (horizontal ? xi > 0 : yi > 0) &&
                                  py >= 0 && py < h;
            const uint16_t* prev = nullptr;
            if (has_prev)
                prev = horizontal ? lp.data() : &prev_row[static_cast<size_t>(px) * d_count];

            if (!prev) {
                for (int d = 0; d < d_count; ++d) out[d] = c[d];
            } else {
                uint16_t prev_min = kInf;
                for (int d = 0; d < d_count; ++d) prev_min = std::min(prev_min, prev[d]);
                for (int d = 0; d < d_count; ++d) {
                    uint16_t best = prev[d];
                    if (d > 0) best = std::min<uint16_t>(best, prev[d - 1] + p1);
                    if (d + 1 < d_count) best = std::min<uint16_t>(best, prev[d + 1] + p1);
                    best = std::min<uint16_t>(best, prev_min + p2);
                    out[d] = static_cast<uint16_t>(c[d] + best - prev_min);
                }
            }
            uint16_t* s = &sum[pix * d_count];
            for (int d = 0; d < d_count; ++d) s[d] = static_cast<uint16_t>(s[d] + out[d]);
        }
        if (!horizontal) prev_row.swap(cur_row);
    }
}

}  // namespace

DisparityMap compute_disparity(const ImageU8& left_gray, const ImageU8& right_gray,
                               const SgmParams& params) {
    if (!left_gray.same_size(right_gray))
        throw std::invalid_argument("stereo views differ in size");
    const int w = left_gray.width();
    const int h = left_gray.height();
    const int d_count = params.max_disparity;
    if (d_count < 1 || d_count >= w)
        throw std::invalid_argument("disparity range incompatible with image width");
    const int radius = std::min(params.block_radius, 3);
    const uint8_t max_cost = static_cast<uint8_t>((2 * radius + 1) * (2 * radius + 1) - 1);

    const auto census_l = census_transform(left_gray, radius);
    const auto census_r = census_transform(right_gray, radius);

    std::vector<uint8_t> cost(static_cast<size_t>(w) * h * d_count, max_cost);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const uint64_t cl = census_l[static_cast<size_t>(y) * w + x];
            uint8_t* c = &cost[(static_cast<size_t>(y) * w + x) * d_count];
            const int dmax = std::min(d_count, x + 1);
            for (int d = 0; d < dmax; ++d)
                c[d] = static_cast<uint8_t>(
                    std::popcount(cl ^ census_r[static_cast<size_t>(y) * w + x - d]));
        }

    std::vector<uint16_t> sum(cost.size(), 0);
    std::vector<PathDir> dirs = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    if (params.eight_paths) {
        dirs.push_back({1, 1});
        dirs.push_back({-1, 1});
        dirs.push_back({1, -1});
        dirs.push_back({-1, -1});
    }
    for (const auto& dir : dirs)
        aggregate_path(cost, w, h, d_count, dir, params.p1, params.p2, sum);

    // Left winner-take-all with parabola subpixel refinement.
    DisparityMap disp;
    disp.values = ImageF(w, h, 1, 0.0f);
    disp.valid = ImageU8(w, h, 1, 0);
    std::vector<int> best_l(static_cast<size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const uint16_t* s = &sum[(static_cast<size_t>(y) * w + x) * d_count];
            int best = 0;
            for (int d = 1; d < d_count; ++d)
                if (s[d] < s[best]) best = d;
            best_l[static_cast<size_t>(y) * w + x] = best;
            double value = best;
            if (params.subpixel && best > 0 && best + 1 < d_count) {
                const double c0 = s[best - 1], c1 = s[best], c2 = s[best + 1];
                const double denom = c0 - 2.0 * c1 + c2;
                if (denom > 1e-9) value += (c0 - c2) / (2.0 * denom);
            }
            disp.values.at(x, y) = static_cast<float>(value);
        }

    // Right-anchored winner from the same aggregated volume:
    // S_R(x, y, d) = S(x + d, y, d).
    std::vector<int> best_r(static_cast<size_t>(w) * h, -1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int best = -1;
            uint16_t best_cost = std::numeric_limits<uint16_t>::max();
            for (int d = 0; d < d_count && x + d < w; ++d) {
                const uint16_t s = sum[(static_cast<size_t>(y) * w + x + d) * d_count + d];
                if (s < best_cost) {
                    best_cost = s;
                    best = d;
                }
            }
            best_r[static_cast<size_t>(y) * w + x] = best;
        }

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int dl = best_l[static_cast<size_t>(y) * w + x];
            const int xr = x - dl;
            if (xr < 0) continue;
            const int dr = best_r[static_cast<size_t>(y) * w + xr];
            if (dr >= 0 && std::abs(dl - dr) <= params.lr_threshold)
                disp.valid.at(x, y) = 1;
        }
    return disp;
}

DisparityMap compute_disparity(const PolarizedStereoFrame& frame, const SgmParams& params) {
    frame.validate();
    return compute_disparity(to_gray(frame.left), to_gray(frame.right), params);
}

}  // namespace pw::stereo
