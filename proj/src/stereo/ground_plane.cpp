#include "pw/stereo/ground_plane.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace pw::stereo {
namespace {

double edge_sign(const std::array<double, 2>& a, const std::array<double, 2>& b,
                 double u, double v) {
    return (b[0] - a[0]) * (v - a[1]) - (b[1] - a[1]) * (u - a[0]);
}

/// One weighted least-squares solve; weights of 1 give plain LS.
std::optional<Eigen::Vector3d> solve_weighted(std::span<const PlanePoint> pts,
                                              const std::vector<double>& weights) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < pts.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const Eigen::Vector3d row(pts[i].u, pts[i].v, 1.0);
        ata += w * row * row.transpose();
        atb += w * pts[i].disparity * row;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
    lu.setThreshold(1e-10);
    if (lu.rank() < 3) return std::nullopt;  // collinear samples
    return lu.solve(atb);
}

GroundPlane finish(const Eigen::Vector3d& coeffs, std::span<const PlanePoint> pts,
                   double inlier_threshold) {
    GroundPlane plane;
    plane.a = coeffs[0];
    plane.b = coeffs[1];
    plane.c = coeffs[2];
    for (const auto& p : pts) {
        const double r = plane.disparity_at(p.u, p.v) - p.disparity;
        if (std::abs(r) < inlier_threshold) ++plane.inlier_count;
    }
    plane.inlier_fraction = pts.empty() ? 0.0 : static_cast<double>(plane.inlier_count) / pts.size();
    return plane;
}

}  // namespace

bool RoiTriangle::contains(double u, double v) const {
    const double s0 = edge_sign(p0, p1, u, v);
    const double s1 = edge_sign(p1, p2, u, v);
    const double s2 = edge_sign(p2, p0, u, v);
    const bool has_neg = s0 < 0 || s1 < 0 || s2 < 0;
    const bool has_pos = s0 > 0 || s1 > 0 || s2 > 0;
    return !(has_neg && has_pos);
}

RoiTriangle RoiTriangle::default_roi(int width, int height, double v_horizon) {
    return {{width / 2.0, v_horizon + 0.15 * height},
            {0.1 * width, height - 1.0},
            {0.9 * width, height - 1.0}};
}

std::optional<GroundPlane> fit_plane_least_squares(std::span<const PlanePoint> points) {
    if (points.size() < 3) return std::nullopt;
    const auto coeffs = solve_weighted(points, {});
    if (!coeffs) return std::nullopt;
    return finish(*coeffs, points, PlaneFitParams{}.inlier_threshold);
}

std::optional<GroundPlane> fit_plane_points(std::span<const PlanePoint> points,
                                            const PlaneFitParams& params) {
    if (points.size() < 3) return std::nullopt;
    auto coeffs = solve_weighted(points, {});
    if (!coeffs) return std::nullopt;

    const double s2 = params.cauchy_scale * params.cauchy_scale;
    std::vector<double> weights(points.size());
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        for (size_t i = 0; i < points.size(); ++i) {
            const double r = (*coeffs)[0] * points[i].u + (*coeffs)[1] * points[i].v +
                             (*coeffs)[2] - points[i].disparity;
            weights[i] = 1.0 / (1.0 + r * r / s2);  // Cauchy influence / residual
        }
        const auto next = solve_weighted(points, weights);
        if (!next) return std::nullopt;
        const double change = (*next - *coeffs).norm() / std::max(1.0, coeffs->norm());
        coeffs = next;
        if (change < params.tolerance) break;
    }
    return finish(*coeffs, points, params.inlier_threshold);
}

std::optional<GroundPlane> fit_ground_plane(const DisparityMap& disp, const RoiTriangle& roi,
                                            const PlaneFitParams& params) {
    std::vector<PlanePoint> pts;
    for (int y = 0; y < disp.height(); ++y)
        for (int x = 0; x < disp.width(); ++x)
            if (disp.valid.at(x, y) && roi.contains(x, y))
                pts.push_back({static_cast<double>(x), static_cast<double>(y),
                               static_cast<double>(disp.values.at(x, y))});
    return fit_plane_points(pts, params);
}

std::optional<HorizonLine> horizon_line(const GroundPlane& plane) {
    if (plane.a == 0.0 && plane.b == 0.0) return std::nullopt;
    HorizonLine line;
    line.a = plane.a;
    line.b = plane.b;
    line.c = plane.c;
    // Slope between any two points on a*u + b*v + c = 0 is dv/du = -a/b.
    line.tilt = plane.b != 0.0 ? std::atan(-plane.a / plane.b) : std::numbers::pi / 2.0;
    return line;
}

std::optional<double> pixel_distance(const GroundPlane& plane, double focal_length,
                                     double baseline, double u, double v) {
    const double delta = plane.disparity_at(u, v);
    if (delta <= 0.0) return std::nullopt;
    return focal_length * baseline / delta;
}

}  // namespace pw::stereo
