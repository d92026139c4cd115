#pragma once

#include <string>

#include "pw/optics/polar_optics.hpp"

namespace pw::optics {

struct CurveConfig {
    double eta_max = kDefaultEtaMax;
    double mu_absorption = 0.6;
    double particle_share = 0.5;
    double angle_step_deg = 1.0;
};

/// Sky degree of polarization over a (theta_sun, theta_view) grid.
/// Columns: theta_sun_deg, theta_view_deg, psi_deg, degree_of_polarization.
void write_sky_polarization_csv(const std::string& path, const CurveConfig& cfg = {});

/// Exit radiance vs reflection angle for three sky polarization states
/// (unpolarized, 80% perpendicular, 80% parallel).
/// Columns: configuration, theta_deg, e_perp_exit, e_par_exit.
void write_water_reflection_csv(const std::string& path, const CurveConfig& cfg = {});

}  // namespace pw::optics
