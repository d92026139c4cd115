#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pw/geom/angle_maps.hpp"

using namespace pw;
using namespace pw::geom;
using pw::stereo::HorizonLine;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Horizon through two image points, tilt included.
HorizonLine horizon_through(double u0, double v0, double u1, double v1) {
    HorizonLine h;
    h.a = v1 - v0;
    h.b = -(u1 - u0);
    h.c = -(h.a * u0 + h.b * v0);
    if (h.b < 0) {
        h.a = -h.a;
        h.b = -h.b;
        h.c = -h.c;
    }
    h.tilt = std::atan2(v1 - v0, u1 - u0);
    return h;
}
}  // namespace

TEST_CASE("45 degree reflection one focal length below a centered horizon") {
    const CameraIntrinsics intr{720.0, 640.0, 360.0};
    const auto h = horizon_through(0.0, 360.0, 1280.0, 360.0);
    const auto theta = reflection_angle_at(intr, h, 640.0, 360.0 + 720.0);
    REQUIRE(theta.has_value());
    CHECK(*theta == doctest::Approx(kPi / 4).epsilon(1e-9));
}

TEST_CASE("theta approaches 90 degrees just below the horizon") {
    const CameraIntrinsics intr{720.0, 640.0, 360.0};
    const auto h = horizon_through(0.0, 360.0, 1280.0, 360.0);
    const auto theta = reflection_angle_at(intr, h, 640.0, 361.0);
    REQUIRE(theta.has_value());
    CHECK(std::abs(*theta - kPi / 2) < 0.1 * kPi / 180.0);
}

TEST_CASE("pixels on and above the horizon are excluded") {
    const CameraIntrinsics intr{720.0, 640.0, 360.0};
    const auto h = horizon_through(0.0, 360.0, 1280.0, 360.0);
    CHECK(!reflection_angle_at(intr, h, 640.0, 360.0).has_value());
    CHECK(!reflection_angle_at(intr, h, 640.0, 100.0).has_value());
    CHECK(!azimuth_angle_at(intr, h, 640.0, 200.0).has_value());
}

TEST_CASE("angle maps match the 3-D ray-casting oracle") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> focal(300.0, 1000.0);
    std::uniform_real_distribution<double> tilt(-15.0 * kPi / 180.0, 15.0 * kPi / 180.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int below = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int w = 640, hgt = 480;
        const CameraIntrinsics intr{focal(rng), w / 2.0 + 40.0 * (unit(rng) - 0.5),
                                    hgt / 2.0 + 40.0 * (unit(rng) - 0.5)};
        const double om = tilt(rng);
        const double vh = hgt * (0.2 + 0.4 * unit(rng));
        const auto h = horizon_through(0.0, vh, double(w), vh + w * std::tan(om));

        const double u = w * unit(rng), v = hgt * unit(rng);
        const auto theta = reflection_angle_at(intr, h, u, v);
        const auto psi = azimuth_angle_at(intr, h, u, v);
        const auto theta_ref = oracle::reflection_angle(intr, h, u, v);
        const auto psi_ref = oracle::azimuth_angle(intr, h, u, v);

        REQUIRE(theta.has_value() == theta_ref.has_value());
        REQUIRE(psi.has_value() == psi_ref.has_value());
        if (!theta) continue;
        ++below;
        CHECK(std::abs(*theta - *theta_ref) < 1e-6);
        CHECK(std::abs(*psi - *psi_ref) < 1e-6);
    }
    CHECK(below > 3000);
}

TEST_CASE("theta decreases moving straight down from the horizon") {
    const CameraIntrinsics intr{500.0, 320.0, 240.0};
    for (double om_deg : {-10.0, 0.0, 12.0}) {
        const double om = om_deg * kPi / 180.0;
        const auto h = horizon_through(0.0, 150.0, 640.0, 150.0 + 640.0 * std::tan(om));
        for (double u : {60.0, 320.0, 600.0}) {
            // march perpendicular to the horizon line, into the ground side
            const double nx = -std::sin(om), ny = std::cos(om);
            const double v0 = h.v_at(u);
            double prev = kPi;
            for (int step = 2; step < 60; step += 2) {
                const double uu = u + nx * step, vv = v0 + ny * step;
                const auto theta = reflection_angle_at(intr, h, uu, vv);
                if (!theta) continue;
                CHECK(*theta < prev);
                prev = *theta;
            }
            CHECK(prev < kPi / 2);
        }
    }
}

TEST_CASE("rotating image and horizon together leaves theta unchanged") {
    const CameraIntrinsics intr{500.0, 320.0, 240.0};
    const double vh = 180.0;
    const auto flat = horizon_through(0.0, vh, 640.0, vh);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double om = (unit(rng) - 0.5) * 20.0 * kPi / 180.0;
        const double cs = std::cos(om), sn = std::sin(om);
        auto rot = [&](double u, double v) {
            const double du = u - intr.u_c, dv = v - intr.v_c;
            return std::pair{intr.u_c + cs * du - sn * dv, intr.v_c + sn * du + cs * dv};
        };
        auto [hu0, hv0] = rot(0.0, vh);
        auto [hu1, hv1] = rot(640.0, vh);
        const auto tilted = horizon_through(hu0, hv0, hu1, hv1);

        const double u = 640.0 * unit(rng), v = vh + 1.0 + 200.0 * unit(rng);
        const auto base = reflection_angle_at(intr, flat, u, v);
        if (!base) continue;
        auto [ru, rv] = rot(u, v);
        const auto turned = reflection_angle_at(intr, tilted, ru, rv);
        REQUIRE(turned.has_value());
        CHECK(std::abs(*turned - *base) < 1e-6);
    }
}

TEST_CASE("azimuth vanishes on the vertical through the principal point") {
    const CameraIntrinsics intr{500.0, 320.0, 240.0};
    const auto h = horizon_through(0.0, 150.0, 640.0, 150.0);
    for (double v : {151.0, 200.0, 400.0}) {
        const auto psi = azimuth_angle_at(intr, h, 320.0, v);
        REQUIRE(psi.has_value());
        CHECK(std::abs(*psi) < 1e-12);
    }
}

TEST_CASE("azimuth is odd in the horizontal offset under a level horizon") {
    const CameraIntrinsics intr{500.0, 320.0, 240.0};
    const auto h = horizon_through(0.0, 150.0, 640.0, 150.0);
    for (double off : {10.0, 100.0, 250.0}) {
        for (double v : {180.0, 300.0, 450.0}) {
            const auto l = azimuth_angle_at(intr, h, 320.0 - off, v);
            const auto r = azimuth_angle_at(intr, h, 320.0 + off, v);
            REQUIRE(l.has_value());
            REQUIRE(r.has_value());
            CHECK(*r > 0.0);
            CHECK(std::abs(*l + *r) < 1e-12);
        }
    }
}

TEST_CASE("azimuth stays within the open forward half plane") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const CameraIntrinsics intr{400.0, 320.0, 240.0};
    for (int trial = 0; trial < 2000; ++trial) {
        const double om = (unit(rng) - 0.5) * 30.0 * kPi / 180.0;
        const auto h = horizon_through(0.0, 150.0, 640.0, 150.0 + 640.0 * std::tan(om));
        const auto psi = azimuth_angle_at(intr, h, 640.0 * unit(rng), 480.0 * unit(rng));
        if (!psi) continue;
        CHECK(*psi > -kPi / 2);
        CHECK(*psi < kPi / 2);
    }
}

TEST_CASE("full maps agree with the pointwise evaluations") {
    const CameraIntrinsics intr{300.0, 160.0, 120.0};
    const auto h = horizon_through(0.0, 100.0, 320.0, 110.0);
    const auto maps = compute_angle_maps(intr, h, 320, 240);
    for (int y = 0; y < 240; y += 7)
        for (int x = 0; x < 320; x += 11) {
            const auto theta = reflection_angle_at(intr, h, x, y);
            CHECK((maps.below_horizon.at(x, y) != 0) == theta.has_value());
            if (theta) {
                CHECK(maps.theta.at(x, y) == doctest::Approx(*theta).epsilon(1e-6));
                CHECK(maps.psi.at(x, y) ==
                      doctest::Approx(*azimuth_angle_at(intr, h, x, y)).epsilon(1e-6));
            }
        }
}

TEST_CASE("angle map cache reuses maps under small horizon drift") {
    const CameraIntrinsics intr{300.0, 160.0, 120.0};
    AngleMapCache cache;
    auto h = horizon_through(0.0, 100.0, 320.0, 100.0);
    const AngleMaps* first = &cache.get(intr, h, 320, 240);
    h.c += 1e-4;  // below the refresh threshold
    const AngleMaps* second = &cache.get(intr, h, 320, 240);
    CHECK(first == second);

    auto moved = horizon_through(0.0, 130.0, 320.0, 130.0);
    const AngleMaps& third = cache.get(intr, moved, 320, 240);
    CHECK(third.theta.at(160, 200) !=
          doctest::Approx(compute_angle_maps(intr, h, 320, 240).theta.at(160, 200))
              .epsilon(1e-6));
}

TEST_CASE("grayscale export scales the angle range") {
    ImageF map(2, 1, 1, 0.0f);
    ImageU8 mask(2, 1, 1, 255);
    map.at(0, 0) = 0.0f;
    map.at(1, 0) = float(kPi / 2);
    mask.at(0, 0) = 255;
    const auto gray = angle_map_to_gray(map, mask, 0.0, kPi / 2);
    CHECK(gray.at(0, 0) == 0);
    CHECK(gray.at(1, 0) == 255);
    mask.at(1, 0) = 0;
    CHECK(angle_map_to_gray(map, mask, 0.0, kPi / 2).at(1, 0) == 0);
}
