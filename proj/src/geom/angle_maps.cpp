#include "pw/geom/angle_maps.hpp"

#include <algorithm>
#include <cmath>

namespace pw::geom {
namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

struct Vec3 {
    double x, y, z;
};
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
Vec3 scale(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

Vec3 unit_normal(const CameraIntrinsics& intr, const stereo::HorizonLine& hz) {
    const GroundNormal n = ground_normal(intr, hz);
    const double len = std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
    return {n.x / len, n.y / len, n.z / len};
}

Vec3 pixel_ray(const CameraIntrinsics& intr, double u, double v) {
    return {u - intr.u_c, v - intr.v_c, intr.f};
}

}  // namespace

GroundNormal ground_normal(const CameraIntrinsics& intr, const stereo::HorizonLine& hz) {
    // n . (u - u_c, v - v_c, f) == a*u + b*v + c for every pixel ray, so the
    // horizon pixels are exactly the rays parallel to the surface.
    return {hz.a, hz.b, (hz.a * intr.u_c + hz.b * intr.v_c + hz.c) / intr.f};
}

std::optional<double> reflection_angle_at(const CameraIntrinsics& intr,
                                          const stereo::HorizonLine& hz,
                                          double u, double v) {
    const double signed_dist = hz.eval(u, v);
    if (signed_dist <= 0.0) return std::nullopt;
    const Vec3 n = unit_normal(intr, hz);
    const Vec3 d = pixel_ray(intr, u, v);
    return std::acos(clamp_unit(dot(d, n) / norm(d)));
}

std::optional<double> azimuth_angle_at(const CameraIntrinsics& intr,
                                       const stereo::HorizonLine& hz,
                                       double u, double v) {
    if (hz.eval(u, v) <= 0.0) return std::nullopt;
    const Vec3 n = unit_normal(intr, hz);
    const Vec3 d = pixel_ray(intr, u, v);
    const Vec3 forward{0.0, 0.0, 1.0};
    const Vec3 f_proj = sub(forward, scale(n, n.z));
    const Vec3 d_proj = sub(d, scale(n, dot(d, n)));
    // Signed rotation from projected forward to projected ray about the
    // downward normal; positive to the right of forward.
    return std::atan2(dot(cross(f_proj, d_proj), n), dot(f_proj, d_proj));
}

AngleMaps compute_angle_maps(const CameraIntrinsics& intr, const stereo::HorizonLine& hz,
                             int width, int height) {
    AngleMaps maps;
    maps.theta = ImageF(width, height, 1, 0.0f);
    maps.psi = ImageF(width, height, 1, 0.0f);
    maps.below_horizon = ImageU8(width, height, 1, 0);

    const Vec3 n = unit_normal(intr, hz);
    const Vec3 forward{0.0, 0.0, 1.0};
    const Vec3 f_proj = sub(forward, scale(n, n.z));

    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double signed_dist = hz.eval(x, y);
            if (signed_dist <= 0.0) continue;
            const Vec3 d = pixel_ray(intr, x, y);
            const double nd = dot(d, n);
            maps.theta.at(x, y) = static_cast<float>(std::acos(clamp_unit(nd / norm(d))));
            const Vec3 d_proj = sub(d, scale(n, nd));
            maps.psi.at(x, y) = static_cast<float>(
                std::atan2(dot(cross(f_proj, d_proj), n), dot(f_proj, d_proj)));
            maps.below_horizon.at(x, y) = 1;
        }
    return maps;
}

const AngleMaps& AngleMapCache::get(const CameraIntrinsics& intr,
                                    const stereo::HorizonLine& hz, int width, int height) {
    const bool fresh =
        cached_horizon_ && cached_w_ == width && cached_h_ == height &&
        cached_intr_.f == intr.f && cached_intr_.u_c == intr.u_c &&
        cached_intr_.v_c == intr.v_c &&
        std::abs(cached_horizon_->a - hz.a) <= 1e-3 &&
        std::abs(cached_horizon_->b - hz.b) <= 1e-3 &&
        std::abs(cached_horizon_->c - hz.c) <= 1e-3;
    if (!fresh) {
        maps_ = compute_angle_maps(intr, hz, width, height);
        cached_horizon_ = hz;
        cached_intr_ = intr;
        cached_w_ = width;
        cached_h_ = height;
    }
    return maps_;
}

ImageU8 angle_map_to_gray(const ImageF& map, const ImageU8& mask, double lo, double hi) {
    ImageU8 out(map.width(), map.height(), 1, 0);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (mask.at(x, y)) {
                const double t = (map.at(x, y) - lo) / (hi - lo);
                out.at(x, y) = static_cast<std::uint8_t>(std::clamp(t, 0.0, 1.0) * 255.0 + 0.5);
            }
    return out;
}

}  // namespace pw::geom
