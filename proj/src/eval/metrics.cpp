#include "pw/eval/metrics.hpp"

#include <stdexcept>

namespace pw::eval {

ConfusionCounts confusion(const ImageU8& pred, const ImageU8& truth, const ImageU8& valid) {
    if (!pred.same_size(truth) || !pred.same_size(valid))
        throw std::invalid_argument("confusion: mask dimensions differ");
    ConfusionCounts c;
    for (int y = 0; y < pred.height(); ++y)
        for (int x = 0; x < pred.width(); ++x) {
            if (!valid.at(x, y)) continue;
            const std::uint8_t t = truth.at(x, y);
            if (t == kIgnoreLabel) continue;
            const bool is_water = t != 0;
            const bool detected = pred.at(x, y) != 0;
            if (is_water)
                detected ? ++c.tp : ++c.fn;
            else
                detected ? ++c.fp : ++c.tn;
        }
    return c;
}

Metrics metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw std::invalid_argument("metrics: empty counts");
    Metrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / c.total();
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
    return m;
}

std::vector<double> default_bin_edges() {
    std::vector<double> edges;
    for (double e = 0.0; e <= 105.0 + 1e-9; e += 5.0) edges.push_back(e);
    return edges;
}

RangeCurve range_curve(const std::vector<FrameResult>& frames,
                       const std::vector<double>& bin_edges) {
    if (bin_edges.size() < 2) throw std::invalid_argument("range_curve: need at least one bin");
    const size_t bins = bin_edges.size() - 1;
    std::vector<long long> tp(bins, 0), total(bins, 0);

    for (const auto& f : frames) {
        for (int y = 0; y < f.truth->height(); ++y)
            for (int x = 0; x < f.truth->width(); ++x) {
                if (!f.valid->at(x, y)) continue;
                const std::uint8_t t = f.truth->at(x, y);
                if (t == 0 || t == kIgnoreLabel) continue;
                const auto z = stereo::pixel_distance(f.plane, f.focal_length, f.baseline, x, y);
                if (!z) continue;
                size_t bin = bins;
                for (size_t b = 0; b < bins; ++b)
                    if (*z >= bin_edges[b] && *z < bin_edges[b + 1]) {
                        bin = b;
                        break;
                    }
                if (bin == bins) continue;
                ++total[bin];
                if (f.pred->at(x, y)) ++tp[bin];
            }
    }

    RangeCurve curve;
    curve.bin_edges = bin_edges;
    for (size_t b = 0; b < bins; ++b) {
        curve.support.push_back(total[b]);
        if (total[b] > 0)
            curve.rates.push_back(static_cast<double>(tp[b]) / total[b]);
        else
            curve.rates.push_back(std::nullopt);
    }
    return curve;
}

}  // namespace pw::eval
