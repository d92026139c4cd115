#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pw/core/image.hpp"
#include "pw/optics/polar_optics.hpp"
#include "pw/stereo/frame.hpp"
#include "pw/stereo/ground_plane.hpp"

namespace pw::synth {

/// Elliptical puddle on the ground plane, world coordinates in meters
/// (x lateral, z forward from the initial camera position).
struct PuddleSpec {
    double center_x = 0.0;
    double center_z = 10.0;
    double radius_x = 1.0;
    double radius_z = 1.0;
    optics::WaterColumn column = optics::uniform_column(0.6);
};

struct GroundTexture {
    optics::Channels base_albedo{0.45, 0.40, 0.32};  // brownish dirt
    double contrast = 0.5;   // fractional albedo modulation from noise
    double scale = 2.0;      // noise cells per meter
    int octaves = 4;
};

struct SceneSpec {
    int width = 320;
    int height = 240;
    double focal_length = 180.0;   // pixels
    double baseline = 0.12;        // meters
    double camera_height = 1.77;   // meters
    double camera_pitch = 0.0;     // radians, positive looks down
    double camera_z = 0.0;         // forward position along the world track

    double sun_zenith = 1.2;       // theta_sun, radians
    double sun_azimuth = 1.57;     // radians from camera forward, around vertical
    double eta_max = optics::kDefaultEtaMax;
    optics::Channels sky_intensity{0.55, 0.70, 1.0};
    optics::Channels sun_disk_boost{0.25, 0.22, 0.15};  // forward-scatter brightening

    optics::Channels ground_illumination{1.0, 1.0, 0.95};
    GroundTexture texture;
    std::vector<PuddleSpec> puddles;

    double polarizer_transmittance = 0.42;
    double exposure = 560.0;       // radiance -> 8-bit scale
    double noise_sigma = 1.5;      // Gaussian pixel noise, 8-bit units
    std::uint64_t seed = 1;         // fixes world content (texture, geometry)
    std::uint64_t noise_stream = 0; // varies only the pixel noise
};

struct SyntheticFrame {
    stereo::PolarizedStereoFrame frame;
    ImageU8 truth_mask;           // 255 inside puddles
    Image<double> true_disparity;  // analytic, double precision
    stereo::GroundPlane true_plane;
    stereo::HorizonLine true_horizon;
};

/// Renders one polarized stereo frame: Rayleigh sky reflected off puddles
/// through the exit-radiance model, diffuse unpolarized dry ground, ideal
/// Malus polarizers at 42% max transmittance in front of each view.
SyntheticFrame render(const SceneSpec& spec);

/// Camera advances `advance_m` between frames; puddles stay fixed in
/// world coordinates.
std::vector<SyntheticFrame> render_sequence(const SceneSpec& spec, int frames, double advance_m);

/// Pre-polarizer exit radiance of a puddle surface point seen at
/// incidence angle theta and view azimuth (from camera forward).
/// Exposed for radiometric checks.
optics::ExitRadiance puddle_exit_radiance(const SceneSpec& spec, const PuddleSpec& puddle,
                                          double theta, double view_azimuth);

nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& j);
SceneSpec load_scene(const std::string& path);

}  // namespace pw::synth
