#pragma once

#include <optional>

#include "pw/core/image.hpp"
#include "pw/stereo/ground_plane.hpp"

namespace pw::geom {

struct CameraIntrinsics {
    double f = 0.0;    // focal length, pixels
    double u_c = 0.0;  // principal point
    double v_c = 0.0;
};

/// Per-pixel reflection angle theta (from the water-surface normal) and
/// azimuth angle psi (from the camera forward axis), below the horizon.
struct AngleMaps {
    ImageF theta;
    ImageF psi;
    ImageU8 below_horizon;

    int width() const { return theta.width(); }
    int height() const { return theta.height(); }
};

/// The 3-D normal of the plane of rays through the horizon line, in
/// camera coordinates, pointing toward the ground. The water surface is
/// assumed parallel to the horizon.
struct GroundNormal {
    double x, y, z;
};
GroundNormal ground_normal(const CameraIntrinsics& intr, const stereo::HorizonLine& horizon);

/// Reflection angle at pixel (u, v): the angle between the pixel ray and
/// the ground normal. Empty on/above the horizon.
std::optional<double> reflection_angle_at(const CameraIntrinsics& intr,
                                          const stereo::HorizonLine& horizon,
                                          double u, double v);

/// Signed azimuth between the forward axis and the pixel ray, both
/// projected onto the water surface; positive to the right of forward.
std::optional<double> azimuth_angle_at(const CameraIntrinsics& intr,
                                       const stereo::HorizonLine& horizon,
                                       double u, double v);

AngleMaps compute_angle_maps(const CameraIntrinsics& intr, const stereo::HorizonLine& horizon,
                             int width, int height);

/// Reuses the previous maps while the horizon stays within 1e-3 of the
/// one they were built for.
class AngleMapCache {
public:
    const AngleMaps& get(const CameraIntrinsics& intr, const stereo::HorizonLine& horizon,
                         int width, int height);

private:
    std::optional<stereo::HorizonLine> cached_horizon_;
    CameraIntrinsics cached_intr_{};
    int cached_w_ = 0, cached_h_ = 0;
    AngleMaps maps_;
};

/// Debug export: angle linearly scaled to 0-255 over [0, pi/2] for theta
/// and [-pi/2, pi/2] for psi; masked pixels are 0.
ImageU8 angle_map_to_gray(const ImageF& map, const ImageU8& mask, double lo, double hi);

}  // namespace pw::geom
