#pragma once

#include <array>
#include <optional>

namespace pw::optics {

constexpr int kChannels = 3;
using Channels = std::array<double, kChannels>;

constexpr double kAirIndex = 1.0;
constexpr double kWaterIndex = 1.33;
constexpr double kDefaultEtaMax = 0.9;

/// Sun / viewed-sky-point geometry, angles from zenith, azimuth between them.
struct SkyGeometry {
    double theta_sun = 0.0;
    double theta_view = 0.0;
    double psi = 0.0;
};

struct FresnelMedia {
    double n1 = kAirIndex;
    double n2 = kWaterIndex;
    FresnelMedia reversed() const { return {n2, n1}; }
};

/// Incident sky energy split into components perpendicular and parallel
/// to the reflection plane, one pair per color channel.
struct SkyRadiance {
    Channels e_perp{};
    Channels e_par{};
};

/// Fate of energy inside the water column; the three fractions sum to 1
/// per channel.
struct WaterColumn {
    Channels mu_particles{};
    Channels mu_bottom{};
    Channels mu_absorption{};
};

struct ExitRadiance {
    Channels e_perp{};
    Channels e_par{};
};

struct FresnelCoefficients {
    double r_perp = 0.0;
    double r_par = 0.0;
};

/// Angle at the sky point between sun direction and view direction.
double scattering_angle(const SkyGeometry& geom);

/// Rayleigh degree of polarization as a function of scattering angle.
double polarization_degree(double gamma, double eta_max = kDefaultEtaMax);

/// Energy reflectances for the two polarization components. Past the
/// total-internal-reflection critical angle both are 1.
FresnelCoefficients fresnel_reflect(const FresnelMedia& media, double theta);

/// Energy transmittances, the complement of reflection per component.
FresnelCoefficients fresnel_refract(const FresnelMedia& media, double theta);

/// Refraction angle; empty past the critical angle.
std::optional<double> snell_refraction_angle(const FresnelMedia& media, double theta);

/// Total energy crossing the surface into the water, per channel.
Channels entering_energy(const SkyRadiance& sky, const FresnelMedia& media, double theta);

/// Light leaving the water toward the viewer at incidence angle theta:
/// specular reflection of the sky plus the refracted share of in-water
/// scattering, per polarization component and channel. The scattered light
/// exits through the surface at the internal angle whose refraction leaves
/// at theta.
ExitRadiance exit_radiance(const SkyRadiance& sky, const FresnelMedia& media,
                           const WaterColumn& column, double theta);

/// Splits a total sky intensity into perpendicular/parallel components:
/// the unpolarized fraction (1 - eta) divides evenly, the polarized
/// fraction projects by Malus onto the two axes.
/// `polarization_direction_angle` is measured from the perpendicular axis
/// of the reflection plane.
SkyRadiance sky_radiance_for_view(const SkyGeometry& geom, const Channels& total_intensity,
                                  double eta_max, double polarization_direction_angle);

/// Same split with the degree of polarization given directly.
SkyRadiance split_sky_radiance(const Channels& total_intensity, double eta,
                               double polarization_direction_angle);

/// Uniform water column with the stated absorption and an even split of
/// the remaining energy between particle and bottom scattering.
WaterColumn uniform_column(double mu_absorption, double particle_share = 0.5);

}  // namespace pw::optics
