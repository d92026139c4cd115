#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pw/eval/metrics.hpp"

using namespace pw;
using namespace pw::eval;

namespace {
ImageU8 random_mask(int w, int h, std::uint64_t seed, int threshold = 128) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> v(0, 255);
    ImageU8 img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = v(rng) < threshold ? 0 : 255;
    return img;
}
}  // namespace

TEST_CASE("perfect prediction has no errors") {
    const auto truth = random_mask(32, 32, 4);
    const auto valid = ImageU8(32, 32, 1, 255);
    const auto c = confusion(truth, truth, valid);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(c.tp + c.tn == 32 * 32);
}

TEST_CASE("two-by-two enumeration") {
    ImageU8 pred(2, 2, 1, 255);              // all water
    ImageU8 truth(2, 2, 1, 0);
    truth.at(0, 0) = 255;
    truth.at(0, 1) = 255;                    // left column water
    const ImageU8 valid(2, 2, 1, 255);
    const auto c = confusion(pred, truth, valid);
    CHECK(c.tp == 2);
    CHECK(c.fp == 2);
    CHECK(c.tn == 0);
    CHECK(c.fn == 0);

    const auto m = metrics(c);
    CHECK(m.accuracy.value() == doctest::Approx(0.5));
    CHECK(m.recall.value() == doctest::Approx(1.0));
    CHECK(m.precision.value() == doctest::Approx(0.5));
}

TEST_CASE("random masks match the brute-force counter") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto pred = random_mask(64, 64, seed * 3 + 1);
        const auto truth = random_mask(64, 64, seed * 3 + 2, 64);
        const auto valid = random_mask(64, 64, seed * 3 + 3, 32);
        const auto c = confusion(pred, truth, valid);
        const auto ref = oracle::confusion(pred, truth, valid, kIgnoreLabel);
        CHECK(c.tp == ref.tp);
        CHECK(c.fp == ref.fp);
        CHECK(c.tn == ref.tn);
        CHECK(c.fn == ref.fn);
        CHECK(c.total() <= 64 * 64);
    }
}

TEST_CASE("ignore-labeled truth pixels leave every count") {
    ImageU8 pred(3, 1, 1, 255);
    ImageU8 truth(3, 1, 1, 0);
    truth.at(1, 0) = kIgnoreLabel;
    truth.at(2, 0) = 255;
    const ImageU8 valid(3, 1, 1, 255);
    const auto c = confusion(pred, truth, valid);
    CHECK(c.total() == 2);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
}

TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS(confusion(ImageU8(2, 2, 1, 0), ImageU8(3, 2, 1, 0), ImageU8(2, 2, 1, 255)));
}

TEST_CASE("metrics report absent ratios instead of zero") {
    ConfusionCounts none_predicted{0, 0, 10, 5};
    const auto m1 = metrics(none_predicted);
    CHECK(!m1.precision.has_value());
    CHECK(m1.recall.value() == doctest::Approx(0.0));

    ConfusionCounts no_truth{0, 3, 10, 0};
    const auto m2 = metrics(no_truth);
    CHECK(!m2.recall.has_value());
    CHECK(m2.precision.value() == doctest::Approx(0.0));

    CHECK_THROWS(metrics(ConfusionCounts{}));
}

TEST_CASE("perfect metrics are all one") {
    const auto m = metrics({50, 0, 30, 0});
    CHECK(m.accuracy.value() == doctest::Approx(1.0));
    CHECK(m.recall.value() == doctest::Approx(1.0));
    CHECK(m.precision.value() == doctest::Approx(1.0));
}

TEST_CASE("default bins cover 0 to 105 meters in 5 meter steps") {
    const auto edges = default_bin_edges();
    REQUIRE(edges.size() == 22);
    CHECK(edges.front() == 0.0);
    CHECK(edges.back() == 105.0);
    for (size_t i = 1; i < edges.size(); ++i) CHECK(edges[i] - edges[i - 1] == doctest::Approx(5.0));
}

namespace {
// One synthetic frame result: truth water strip rows, prediction configurable.
struct CurveFixture {
    ImageU8 pred, truth, valid;
    stereo::GroundPlane plane;

    CurveFixture(int w, int h, bool detect_near_only) {
        pred = ImageU8(w, h, 1, 0);
        truth = ImageU8(w, h, 1, 0);
        valid = ImageU8(w, h, 1, 255);
        plane = {0.0, 0.1, -10.0};  // delta = 0.1 v - 10, horizon at v=100
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double delta = plane.disparity_at(x, y);
                if (delta <= 0) continue;
                truth.at(x, y) = 255;
                const double z = 720.0 * 0.12 / delta;
                if (!detect_near_only || z < 10.0) pred.at(x, y) = 255;
            }
    }

    eval::FrameResult result() const { return {&pred, &truth, &valid, plane, 720.0, 0.12}; }
};
}  // namespace

TEST_CASE("a perfect detector scores one in every populated bin") {
    const CurveFixture fx(64, 480, false);
    const auto curve = range_curve({fx.result()});
    bool populated = false;
    for (size_t i = 0; i + 1 < curve.bin_edges.size(); ++i) {
        if (curve.support[i] == 0) {
            CHECK(!curve.rates[i].has_value());
            continue;
        }
        populated = true;
        CHECK(curve.rates[i].value() == doctest::Approx(1.0));
    }
    CHECK(populated);
}

TEST_CASE("a near-field-only detector scores zero beyond ten meters") {
    const CurveFixture fx(64, 480, true);
    const auto curve = range_curve({fx.result()});
    for (size_t i = 0; i + 1 < curve.bin_edges.size(); ++i) {
        if (!curve.rates[i].has_value()) continue;
        if (curve.bin_edges[i] >= 10.0) CHECK(curve.rates[i].value() == doctest::Approx(0.0));
        if (curve.bin_edges[i + 1] <= 10.0) CHECK(curve.rates[i].value() == doctest::Approx(1.0));
    }
}

TEST_CASE("range aggregation is frame-order independent") {
    const CurveFixture a(64, 480, true);
    const CurveFixture b(64, 480, false);
    const auto fwd = range_curve({a.result(), b.result()});
    const auto rev = range_curve({b.result(), a.result()});
    REQUIRE(fwd.rates.size() == rev.rates.size());
    for (size_t i = 0; i < fwd.rates.size(); ++i) {
        CHECK(fwd.support[i] == rev.support[i]);
        CHECK(fwd.rates[i].has_value() == rev.rates[i].has_value());
        if (fwd.rates[i]) CHECK(fwd.rates[i].value() == rev.rates[i].value());
    }
}
