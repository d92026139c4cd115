#include "pw/optics/polar_optics.hpp"

#include <algorithm>
#include <cmath>

namespace pw::optics {
namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

double scattering_angle(const SkyGeometry& geom) {
    const double c = std::sin(geom.theta_sun) * std::sin(geom.theta_view) * std::cos(geom.psi) +
                     std::cos(geom.theta_sun) * std::cos(geom.theta_view);
    return std::acos(clamp_unit(c));
}

double polarization_degree(double gamma, double eta_max) {
    const double s = std::sin(gamma);
    const double c = std::cos(gamma);
    return eta_max * s * s / (1.0 + c * c);
}

FresnelCoefficients fresnel_reflect(const FresnelMedia& media, double theta) {
    const double n1 = media.n1;
    const double n2 = media.n2;
    const double s = (n1 / n2) * std::sin(theta);
    if (s >= 1.0) return {1.0, 1.0};  // total internal reflection
    const double cos_i = std::cos(theta);
    const double cos_t = std::sqrt(1.0 - s * s);
    const double rp = (n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t);
    const double rl = (n1 * cos_t - n2 * cos_i) / (n1 * cos_t + n2 * cos_i);
    return {rp * rp, rl * rl};
}

FresnelCoefficients fresnel_refract(const FresnelMedia& media, double theta) {
    const FresnelCoefficients r = fresnel_reflect(media, theta);
    return {1.0 - r.r_perp, 1.0 - r.r_par};
}

std::optional<double> snell_refraction_angle(const FresnelMedia& media, double theta) {
    const double s = (media.n1 / media.n2) * std::sin(theta);
    if (s > 1.0) return std::nullopt;
    return std::asin(clamp_unit(s));
}

Channels entering_energy(const SkyRadiance& sky, const FresnelMedia& media, double theta) {
    const FresnelCoefficients r = fresnel_reflect(media, theta);
    Channels out{};
    for (int c = 0; c < kChannels; ++c)
        out[c] = sky.e_perp[c] * (1.0 - r.r_perp) + sky.e_par[c] * (1.0 - r.r_par);
    return out;
}

ExitRadiance exit_radiance(const SkyRadiance& sky, const FresnelMedia& media,
                           const WaterColumn& column, double theta) {
    const FresnelCoefficients r = fresnel_reflect(media, theta);
    const Channels entering = entering_energy(sky, media, theta);

    // The scattered light leaves through the surface at the internal angle
    // whose refraction exits at theta; past grazing nothing enters anyway.
    FresnelCoefficients t_exit{0.0, 0.0};
    if (const auto theta_in = snell_refraction_angle(media, theta))
        t_exit = fresnel_refract(media.reversed(), *theta_in);

    ExitRadiance out;
    for (int c = 0; c < kChannels; ++c) {
        const double scatter = column.mu_particles[c] + column.mu_bottom[c];
        out.e_perp[c] = sky.e_perp[c] * r.r_perp + 0.5 * entering[c] * scatter * t_exit.r_perp;
        out.e_par[c] = sky.e_par[c] * r.r_par + 0.5 * entering[c] * scatter * t_exit.r_par;
    }
    return out;
}

SkyRadiance split_sky_radiance(const Channels& total_intensity, double eta,
                               double polarization_direction_angle) {
    const double c = std::cos(polarization_direction_angle);
    const double s = std::sin(polarization_direction_angle);
    const double perp_share = 0.5 * (1.0 - eta) + eta * c * c;
    const double par_share = 0.5 * (1.0 - eta) + eta * s * s;
    SkyRadiance out;
    for (int ch = 0; ch < kChannels; ++ch) {
        out.e_perp[ch] = total_intensity[ch] * perp_share;
        out.e_par[ch] = total_intensity[ch] * par_share;
    }
    return out;
}

SkyRadiance sky_radiance_for_view(const SkyGeometry& geom, const Channels& total_intensity,
                                  double eta_max, double polarization_direction_angle) {
    const double eta = polarization_degree(scattering_angle(geom), eta_max);
    return split_sky_radiance(total_intensity, eta, polarization_direction_angle);
}

WaterColumn uniform_column(double mu_absorption, double particle_share) {
    const double scatter = 1.0 - mu_absorption;
    WaterColumn col;
    col.mu_particles.fill(scatter * particle_share);
    col.mu_bottom.fill(scatter * (1.0 - particle_share));
    col.mu_absorption.fill(mu_absorption);
    return col;
}

}  // namespace pw::optics
