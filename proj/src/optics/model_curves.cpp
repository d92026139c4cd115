#include "pw/optics/model_curves.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace pw::optics {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(10);
    return out;
}

}  // namespace

void write_sky_polarization_csv(const std::string& path, const CurveConfig& cfg) {
    auto out = open_csv(path);
    out << "theta_sun_deg,theta_view_deg,psi_deg,degree_of_polarization\n";
    for (double sun = 0.0; sun <= 90.0; sun += 15.0) {
        for (double view = 0.0; view <= 90.0 + 1e-9; view += cfg.angle_step_deg) {
            for (double psi = 0.0; psi < 360.0; psi += 15.0) {
                const SkyGeometry geom{sun * kDegToRad, view * kDegToRad, psi * kDegToRad};
                const double eta = polarization_degree(scattering_angle(geom), cfg.eta_max);
                out << sun << ',' << view << ',' << psi << ',' << eta << '\n';
            }
        }
    }
}

void write_water_reflection_csv(const std::string& path, const CurveConfig& cfg) {
    auto out = open_csv(path);
    out << "configuration,theta_deg,e_perp_exit,e_par_exit\n";

    struct Config {
        const char* name;
        double eta;
        double direction;  // polarized fraction's angle from the perpendicular axis
    };
    const Config configs[] = {
        {"unpolarized", 0.0, 0.0},
        {"polarized_80_perpendicular", 0.8, 0.0},
        {"polarized_80_parallel", 0.8, std::numbers::pi / 2.0},
    };

    const FresnelMedia media{};
    const WaterColumn column = uniform_column(cfg.mu_absorption, cfg.particle_share);
    const Channels total{1.0, 1.0, 1.0};

    for (const auto& c : configs) {
        for (double deg = 0.0; deg < 90.0 + 1e-9; deg += cfg.angle_step_deg) {
            const double theta = deg * kDegToRad;
            const SkyRadiance sky = split_sky_radiance(total, c.eta, c.direction);
            const ExitRadiance exit = exit_radiance(sky, media, column, theta);
            out << c.name << ',' << deg << ',' << exit.e_perp[0] << ',' << exit.e_par[0] << '\n';
        }
    }
}

}  // namespace pw::optics
