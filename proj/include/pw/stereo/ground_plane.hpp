#pragma once

#include <array>
#include <optional>
#include <span>

#include "pw/stereo/frame.hpp"

namespace pw::stereo {

/// Disparity plane delta = a*u + b*v + c; its zero line is the horizon.
struct GroundPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    int inlier_count = 0;
    double inlier_fraction = 0.0;

    double disparity_at(double u, double v) const { return a * u + b * v + c; }
};

struct HorizonLine {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double tilt = 0.0;  // omega, radians, slope of the line in image coords

    double eval(double u, double v) const { return a * u + b * v + c; }
    /// v coordinate of the line at column u (b != 0).
    double v_at(double u) const { return -(a * u + c) / b; }
};

/// Triangle in front of the car whose disparity samples feed the plane fit.
struct RoiTriangle {
    std::array<double, 2> p0, p1, p2;

    bool contains(double u, double v) const;

    /// Apex centered below an assumed horizon row, base along the bottom.
    static RoiTriangle default_roi(int width, int height, double v_horizon);
};

struct PlanePoint {
    double u, v, disparity;
};

struct PlaneFitParams {
    double cauchy_scale = 1.0;      // s in log(1 + (r/s)^2), disparity pixels
    int max_iterations = 20;
    double tolerance = 1e-8;        // relative coefficient change
    double inlier_threshold = 1.0;  // residual below which a point counts as inlier
};

/// Iteratively reweighted least squares under the Cauchy loss, seeded by an
/// ordinary least-squares fit. Empty on degenerate (collinear or < 3) data.
std::optional<GroundPlane> fit_plane_points(std::span<const PlanePoint> points,
                                            const PlaneFitParams& params = {});

/// Plain least squares, no robust weighting. Used as the comparison
/// baseline for the robustness property.
std::optional<GroundPlane> fit_plane_least_squares(std::span<const PlanePoint> points);

/// Fits on all valid disparity samples inside the triangle.
std::optional<GroundPlane> fit_ground_plane(const DisparityMap& disp, const RoiTriangle& roi,
                                            const PlaneFitParams& params = {});

/// Zero-disparity line of the plane; empty when (a, b) == (0, 0).
std::optional<HorizonLine> horizon_line(const GroundPlane& plane);

/// Pinhole-stereo distance Z = f * B / delta at the plane disparity of
/// (u, v); empty at or above the horizon.
std::optional<double> pixel_distance(const GroundPlane& plane, double focal_length,
                                     double baseline, double u, double v);

}  // namespace pw::stereo
