#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pw/core/image.hpp"
#include "pw/stereo/ground_plane.hpp"

namespace pw::eval {

/// Truth-mask value excluded from every count (wet-but-not-water areas).
constexpr std::uint8_t kIgnoreLabel = 128;

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;

    long long total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

/// Pixelwise counts over valid pixels; truth pixels labeled kIgnoreLabel
/// are skipped. Throws on dimension mismatch.
ConfusionCounts confusion(const ImageU8& pred, const ImageU8& truth, const ImageU8& valid);

struct Metrics {
    std::optional<double> accuracy;
    std::optional<double> recall;
    std::optional<double> precision;
};

/// Ratios with zero denominators come back absent, never as 0. Throws on
/// an all-zero count.
Metrics metrics(const ConfusionCounts& c);

struct RangeCurve {
    std::vector<double> bin_edges;                 // size bins + 1, meters
    std::vector<std::optional<double>> rates;      // TP / (TP + FN) per bin
    std::vector<long long> support;                // truth-water pixels per bin

    double bin_center(size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

/// 5 m bins from 0 to 105 m, the default detection-range axis.
std::vector<double> default_bin_edges();

struct FrameResult {
    const ImageU8* pred;
    const ImageU8* truth;
    const ImageU8* valid;
    stereo::GroundPlane plane;
    double focal_length;
    double baseline;
};

/// Per-distance-bin detection rate over ground-truth water pixels, their
/// distances read off the fitted plane.
RangeCurve range_curve(const std::vector<FrameResult>& frames,
                       const std::vector<double>& bin_edges = default_bin_edges());

}  // namespace pw::eval
