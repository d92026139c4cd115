// Independent reference implementations the tests compare against. These
// deliberately avoid the code paths used by the library: the angle oracle
// builds the ground plane from two horizon rays and intersects pixel rays
// in 3-D, the GMM oracle uses explicit matrix inverses, the confusion
// oracle is a per-pixel loop, and the HSV oracle follows the Foley-van Dam
// sextant formulation.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>

#include "pw/core/image.hpp"
#include "pw/features/gmm.hpp"
#include "pw/geom/angle_maps.hpp"
#include "pw/stereo/ground_plane.hpp"

namespace oracle {

struct Vec3 {
    double x, y, z;
};

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 scale(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// Camera ray through pixel (u, v): x right, y down, z forward.
inline Vec3 pixel_ray(const pw::geom::CameraIntrinsics& intr, double u, double v) {
    return {u - intr.u_c, v - intr.v_c, intr.f};
}

// Ground-plane normal from two rays along the horizon line, oriented so
// that it points from the camera toward the ground (positive y side).
inline Vec3 ground_normal_from_horizon(const pw::geom::CameraIntrinsics& intr,
                                       const pw::stereo::HorizonLine& horizon) {
    // Two distinct points on a*u + b*v + c = 0.
    double u0, v0, u1, v1;
    if (std::abs(horizon.b) >= std::abs(horizon.a)) {
        u0 = 0.0;
        v0 = -(horizon.a * u0 + horizon.c) / horizon.b;
        u1 = 1000.0;
        v1 = -(horizon.a * u1 + horizon.c) / horizon.b;
    } else {
        v0 = 0.0;
        u0 = -(horizon.b * v0 + horizon.c) / horizon.a;
        v1 = 1000.0;
        u1 = -(horizon.b * v1 + horizon.c) / horizon.a;
    }
    Vec3 n = cross(pixel_ray(intr, u0, v0), pixel_ray(intr, u1, v1));
    if (n.y < 0) n = scale(n, -1.0);
    return scale(n, 1.0 / norm(n));
}

// Incidence angle at the water surface for the ray through (u, v):
// intersect the ray with the ground plane a camera-height below the
// camera, then measure the angle between the (reversed) ray and the
// surface normal at the hit point. The camera height cancels, so any
// positive height works.
inline std::optional<double> reflection_angle(const pw::geom::CameraIntrinsics& intr,
                                              const pw::stereo::HorizonLine& horizon,
                                              double u, double v, double height = 1.77) {
    const Vec3 n = ground_normal_from_horizon(intr, horizon);
    Vec3 d = pixel_ray(intr, u, v);
    d = scale(d, 1.0 / norm(d));
    const double dn = dot(d, n);
    if (dn <= 0) return std::nullopt;  // on or above the horizon
    const double t = height / dn;
    (void)t;  // the hit point itself is not needed for the angle
    const double c = std::clamp(dn, -1.0, 1.0);
    return std::acos(c);  // angle between ray and surface normal
}

// Azimuth of the viewed ground point from the camera forward axis, both
// projected into the water surface; signed, positive right of forward.
inline std::optional<double> azimuth_angle(const pw::geom::CameraIntrinsics& intr,
                                           const pw::stereo::HorizonLine& horizon,
                                           double u, double v) {
    const Vec3 n = ground_normal_from_horizon(intr, horizon);
    Vec3 d = pixel_ray(intr, u, v);
    d = scale(d, 1.0 / norm(d));
    if (dot(d, n) <= 0) return std::nullopt;
    const Vec3 fwd{0.0, 0.0, 1.0};
    const Vec3 dp = sub(d, scale(n, dot(d, n)));
    const Vec3 fp = sub(fwd, scale(n, dot(fwd, n)));
    const double cosv = dot(dp, fp);
    const double sinv = dot(n, cross(fp, dp));
    return std::atan2(sinv, cosv);
}

// Mixture density by the book: explicit inverse and determinant.
inline double gmm_density(const pw::features::GmmModel& model, const Eigen::VectorXd& x) {
    double total = 0.0;
    const double d = static_cast<double>(model.dim);
    for (const auto& cl : model.clusters) {
        const Eigen::MatrixXd inv = cl.covariance.inverse();
        const double det = cl.covariance.determinant();
        const Eigen::VectorXd r = x - cl.mean;
        const double quad = r.dot(inv * r);
        total += cl.weight * std::exp(-0.5 * quad) /
                 std::sqrt(std::pow(2.0 * M_PI, d) * det);
    }
    return total;
}

struct Confusion {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Confusion confusion(const pw::ImageU8& pred, const pw::ImageU8& truth,
                           const pw::ImageU8& valid, std::uint8_t ignore_label) {
    Confusion c;
    for (int y = 0; y < pred.height(); ++y)
        for (int x = 0; x < pred.width(); ++x) {
            if (!valid.at(x, y)) continue;
            if (truth.at(x, y) == ignore_label) continue;
            const bool p = pred.at(x, y) != 0;
            const bool t = truth.at(x, y) != 0;
            if (p && t)
                ++c.tp;
            else if (p && !t)
                ++c.fp;
            else if (!p && t)
                ++c.fn;
            else
                ++c.tn;
        }
    return c;
}

struct Hsv {
    double h, s, v;
};

// Foley-van Dam sextant HSV.
inline Hsv rgb_to_hsv(double r, double g, double b) {
    const double maxc = std::max(r, std::max(g, b));
    const double minc = std::min(r, std::min(g, b));
    Hsv out{0.0, 0.0, maxc};
    const double delta = maxc - minc;
    if (maxc != 0.0) out.s = delta / maxc;
    if (out.s == 0.0) return out;
    double h;
    if (r == maxc)
        h = (g - b) / delta;
    else if (g == maxc)
        h = 2.0 + (b - r) / delta;
    else
        h = 4.0 + (r - g) / delta;
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    out.h = h;
    return out;
}

}  // namespace oracle
