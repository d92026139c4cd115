#include "pw/synth/scene.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "pw/synth/value_noise.hpp"

namespace pw::synth {
namespace {

using optics::Channels;

struct Vec3 {
    double x = 0, y = 0, z = 0;
};
Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

// World frame: x right, y down, z forward. Ground plane is y = camera_height.
constexpr Vec3 kUp{0.0, -1.0, 0.0};

Vec3 sun_direction(const SceneSpec& spec) {
    const double s = std::sin(spec.sun_zenith);
    return {s * std::sin(spec.sun_azimuth), -std::cos(spec.sun_zenith),
            s * std::cos(spec.sun_azimuth)};
}

/// Total intensity, degree, and E-vector direction of sky light arriving
/// from direction `view` (unit, pointing up at the sky).
struct SkyState {
    Channels total{};
    double eta = 0.0;
    Vec3 e_dir{1, 0, 0};
};

SkyState sky_state(const SceneSpec& spec, Vec3 view, Vec3 sun) {
    SkyState st;
    const double cos_gamma = std::clamp(dot(view, sun), -1.0, 1.0);
    const double gamma = std::acos(cos_gamma);
    st.eta = optics::polarization_degree(gamma, spec.eta_max);
    const double sun_glow = std::pow(std::max(cos_gamma, 0.0), 8.0);
    for (int c = 0; c < optics::kChannels; ++c)
        st.total[c] = spec.sky_intensity[c] + spec.sun_disk_boost[c] * sun_glow;
    // Rayleigh-scattered light is polarized perpendicular to the
    // sun-view scattering plane.
    const Vec3 e = cross(view, sun);
    const double en = norm(e);
    if (en > 1e-9)
        st.e_dir = {e.x / en, e.y / en, e.z / en};
    else
        st.e_dir = normalized(cross(view, Vec3{1, 0, 0}));
    return st;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t h = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ull;
    h = (h ^ (h >> 27)) * 0x94D049BB133111EBull;
    return h ^ (h >> 31);
}

struct Shading {
    Channels i_perp{};   // along the axis perpendicular to the plane of incidence
    Channels i_par{};
    Vec3 axis_perp{1, 0, 0};
    Vec3 axis_par{0, 1, 0};
    bool polarized = false;  // false: orientation-free unpolarized light
};

/// Pre-polarizer radiance of a ground hit.
Shading shade_ground(const SceneSpec& spec, const ValueNoise& noise, Vec3 ray, Vec3 sun,
                     double ground_x, double ground_z, const PuddleSpec* puddle) {
    Shading sh;
    if (!puddle) {
        const double n = noise.fractal(ground_x * spec.texture.scale,
                                       ground_z * spec.texture.scale, spec.texture.octaves);
        const double mod = 1.0 + spec.texture.contrast * (2.0 * n - 1.0);
        for (int c = 0; c < optics::kChannels; ++c) {
            const double albedo = std::max(spec.texture.base_albedo[c] * mod, 0.0);
            const double radiance = spec.ground_illumination[c] * albedo;
            sh.i_perp[c] = radiance * 0.5;
            sh.i_par[c] = radiance * 0.5;
        }
        return sh;
    }

    // Specular water: incidence angle from the vertical, mirror ray up to
    // the sky, mix reflection with refracted in-water scattering.
    const double cos_theta = std::clamp(ray.y, 0.0, 1.0);
    const double theta = std::acos(cos_theta);
    const Vec3 sky_view{ray.x, -ray.y, ray.z};

    const SkyState sky = sky_state(spec, sky_view, sun);

    Vec3 axis_perp = cross(ray, kUp);  // horizontal, normal to the plane of incidence
    const double pn = norm(axis_perp);
    axis_perp = pn > 1e-9 ? Vec3{axis_perp.x / pn, axis_perp.y / pn, axis_perp.z / pn}
                          : Vec3{1, 0, 0};
    const Vec3 axis_par = normalized(cross(ray, axis_perp));

    // Angle of the sky E-vector from the perpendicular axis.
    const double chi = std::acos(std::clamp(std::abs(dot(sky.e_dir, axis_perp)), 0.0, 1.0));
    const optics::SkyRadiance incident = optics::split_sky_radiance(sky.total, sky.eta, chi);
    const optics::ExitRadiance exit =
        optics::exit_radiance(incident, optics::FresnelMedia{}, puddle->column, theta);

    sh.i_perp = exit.e_perp;
    sh.i_par = exit.e_par;
    sh.axis_perp = axis_perp;
    sh.axis_par = axis_par;
    sh.polarized = true;
    return sh;
}

Shading shade_sky(const SceneSpec& spec, Vec3 ray, Vec3 sun) {
    const Vec3 view = normalized(Vec3{ray.x, std::min(ray.y, -1e-6), ray.z});
    const SkyState sky = sky_state(spec, view, sun);
    Shading sh;
    sh.axis_perp = sky.e_dir;
    sh.axis_par = normalized(cross(view, sky.e_dir));
    sh.polarized = true;
    for (int c = 0; c < optics::kChannels; ++c) {
        sh.i_perp[c] = sky.total[c] * (0.5 * (1.0 - sky.eta) + sky.eta);
        sh.i_par[c] = sky.total[c] * 0.5 * (1.0 - sky.eta);
    }
    return sh;
}

/// Ideal linear polarizer at max transmittance T: each incoherent
/// component passes by Malus against the projected transmission axis.
Channels through_polarizer(const Shading& sh, Vec3 ray, Vec3 axis, double transmittance) {
    Channels out{};
    if (!sh.polarized) {
        for (int c = 0; c < optics::kChannels; ++c)
            out[c] = transmittance * (sh.i_perp[c] + sh.i_par[c]) * 0.5;
        return out;
    }
    Vec3 t = axis - dot(axis, ray) * ray;
    const double tn = norm(t);
    if (tn < 1e-9) t = sh.axis_perp;  // axis parallel to the ray: degenerate view
    else t = {t.x / tn, t.y / tn, t.z / tn};
    const double cp = dot(t, sh.axis_perp);
    const double cq = dot(t, sh.axis_par);
    for (int c = 0; c < optics::kChannels; ++c)
        out[c] = transmittance * (sh.i_perp[c] * cp * cp + sh.i_par[c] * cq * cq);
    return out;
}

ImageU8 render_view(const SceneSpec& spec, Vec3 origin, Vec3 polarizer_axis,
                    std::uint64_t noise_salt) {
    const double cp = std::cos(spec.camera_pitch);
    const double sp = std::sin(spec.camera_pitch);
    const double u_c = spec.width / 2.0;
    const double v_c = spec.height / 2.0;
    const Vec3 sun = sun_direction(spec);
    const ValueNoise ground_noise(spec.seed);

    std::mt19937_64 rng(mix_seed(spec.seed ^ mix_seed(spec.noise_stream, 7), noise_salt));
    std::normal_distribution<double> pixel_noise(0.0, spec.noise_sigma);

    ImageU8 img(spec.width, spec.height, 3);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const Vec3 d_cam{x - u_c, y - v_c, spec.focal_length};
            const Vec3 d = normalized(Vec3{d_cam.x, cp * d_cam.y + sp * d_cam.z,
                                           -sp * d_cam.y + cp * d_cam.z});
            Shading sh;
            if (d.y > 1e-9) {
                const double t = spec.camera_height / d.y;
                const Vec3 hit = origin + t * d;
                const PuddleSpec* inside = nullptr;
                for (const auto& p : spec.puddles) {
                    const double dx = (hit.x - p.center_x) / p.radius_x;
                    const double dz = (hit.z - p.center_z) / p.radius_z;
                    if (dx * dx + dz * dz <= 1.0) {
                        inside = &p;
                        break;
                    }
                }
                sh = shade_ground(spec, ground_noise, d, sun, hit.x, hit.z, inside);
            } else {
                sh = shade_sky(spec, d, sun);
            }
            const Channels rgb = through_polarizer(sh, d, polarizer_axis,
                                                   spec.polarizer_transmittance);
            for (int c = 0; c < 3; ++c) {
                const double value = rgb[c] * spec.exposure + pixel_noise(rng);
                img.at(x, y, c) =
                    static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0) + 0.5);
            }
        }
    return img;
}

}  // namespace

optics::ExitRadiance puddle_exit_radiance(const SceneSpec& spec, const PuddleSpec& puddle,
                                          double theta, double view_azimuth) {
    const double s = std::sin(theta);
    const Vec3 ray{s * std::sin(view_azimuth), std::cos(theta), s * std::cos(view_azimuth)};
    const Shading sh = shade_ground(spec, ValueNoise(spec.seed), ray, sun_direction(spec),
                                    0.0, 0.0, &puddle);
    return {sh.i_perp, sh.i_par};
}

SyntheticFrame render(const SceneSpec& spec) {
    SyntheticFrame out;
    const double cp = std::cos(spec.camera_pitch);
    const double sp = std::sin(spec.camera_pitch);
    const double u_c = spec.width / 2.0;
    const double v_c = spec.height / 2.0;

    const Vec3 left_origin{0.0, 0.0, spec.camera_z};
    const Vec3 right_origin{spec.baseline, 0.0, spec.camera_z};
    // Pitch is a rotation about the camera x axis, so the horizontal
    // polarizer axis is pitch-invariant and the vertical one tilts with it.
    const Vec3 horizontal_axis{1.0, 0.0, 0.0};
    const Vec3 vertical_axis{0.0, cp, -sp};

    out.frame.left = render_view(spec, left_origin, horizontal_axis, 1);
    out.frame.right = render_view(spec, right_origin, vertical_axis, 2);
    out.frame.focal_length = spec.focal_length;
    out.frame.baseline = spec.baseline;
    out.frame.camera_height = spec.camera_height;
    out.frame.principal_u = u_c;
    out.frame.principal_v = v_c;

    // Ground-plane disparity is exact: delta = (B/h) * (n . pixel ray)
    // with n the unit ground normal in camera coordinates.
    const double scale = spec.baseline / spec.camera_height;
    out.true_plane.a = 0.0;
    out.true_plane.b = scale * cp;
    out.true_plane.c = scale * (sp * spec.focal_length - cp * v_c);
    out.true_plane.inlier_count = 0;
    out.true_plane.inlier_fraction = 1.0;
    out.true_horizon = *stereo::horizon_line(out.true_plane);

    out.true_disparity = Image<double>(spec.width, spec.height, 1, 0.0);
    out.truth_mask = ImageU8(spec.width, spec.height, 1, 0);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const double delta = out.true_plane.disparity_at(x, y);
            out.true_disparity.at(x, y) = std::max(delta, 0.0);
            const Vec3 d_cam{x - u_c, y - v_c, spec.focal_length};
            const Vec3 d = normalized(Vec3{d_cam.x, cp * d_cam.y + sp * d_cam.z,
                                           -sp * d_cam.y + cp * d_cam.z});
            if (d.y <= 1e-9) continue;
            const double t = spec.camera_height / d.y;
            const Vec3 hit = left_origin + t * d;
            for (const auto& p : spec.puddles) {
                const double dx = (hit.x - p.center_x) / p.radius_x;
                const double dz = (hit.z - p.center_z) / p.radius_z;
                if (dx * dx + dz * dz <= 1.0) {
                    out.truth_mask.at(x, y) = 255;
                    break;
                }
            }
        }
    return out;
}

std::vector<SyntheticFrame> render_sequence(const SceneSpec& spec, int frames,
                                            double advance_m) {
    if (frames < 1) throw std::invalid_argument("frame count must be >= 1");
    std::vector<SyntheticFrame> out;
    out.reserve(frames);
    for (int i = 0; i < frames; ++i) {
        SceneSpec frame_spec = spec;
        frame_spec.camera_z = spec.camera_z + advance_m * i;
        frame_spec.noise_stream = spec.noise_stream + static_cast<std::uint64_t>(i) + 1;
        auto frame = render(frame_spec);
        frame.frame.frame_id = i;
        out.push_back(std::move(frame));
    }
    return out;
}

namespace {

nlohmann::json channels_to_json(const Channels& c) { return {c[0], c[1], c[2]}; }
Channels channels_from_json(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

nlohmann::json scene_to_json(const SceneSpec& s) {
    nlohmann::json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["focal_length_px"] = s.focal_length;
    j["baseline_m"] = s.baseline;
    j["camera_height_m"] = s.camera_height;
    j["camera_pitch_rad"] = s.camera_pitch;
    j["camera_z_m"] = s.camera_z;
    j["sun_zenith_rad"] = s.sun_zenith;
    j["sun_azimuth_rad"] = s.sun_azimuth;
    j["eta_max"] = s.eta_max;
    j["sky_intensity"] = channels_to_json(s.sky_intensity);
    j["sun_disk_boost"] = channels_to_json(s.sun_disk_boost);
    j["ground_illumination"] = channels_to_json(s.ground_illumination);
    j["texture"] = {{"base_albedo", channels_to_json(s.texture.base_albedo)},
                    {"contrast", s.texture.contrast},
                    {"scale", s.texture.scale},
                    {"octaves", s.texture.octaves}};
    for (const auto& p : s.puddles)
        j["puddles"].push_back({{"center_x_m", p.center_x},
                                {"center_z_m", p.center_z},
                                {"radius_x_m", p.radius_x},
                                {"radius_z_m", p.radius_z},
                                {"mu_particles", channels_to_json(p.column.mu_particles)},
                                {"mu_bottom", channels_to_json(p.column.mu_bottom)},
                                {"mu_absorption", channels_to_json(p.column.mu_absorption)}});
    j["polarizer_transmittance"] = s.polarizer_transmittance;
    j["exposure"] = s.exposure;
    j["noise_sigma"] = s.noise_sigma;
    j["seed"] = s.seed;
    j["noise_stream"] = s.noise_stream;
    return j;
}

SceneSpec scene_from_json(const nlohmann::json& j) {
    SceneSpec s;
    try {
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
        s.focal_length = j.value("focal_length_px", s.focal_length);
        s.baseline = j.value("baseline_m", s.baseline);
        s.camera_height = j.value("camera_height_m", s.camera_height);
        s.camera_pitch = j.value("camera_pitch_rad", s.camera_pitch);
        s.camera_z = j.value("camera_z_m", s.camera_z);
        s.sun_zenith = j.value("sun_zenith_rad", s.sun_zenith);
        s.sun_azimuth = j.value("sun_azimuth_rad", s.sun_azimuth);
        s.eta_max = j.value("eta_max", s.eta_max);
        if (j.contains("sky_intensity")) s.sky_intensity = channels_from_json(j["sky_intensity"]);
        if (j.contains("sun_disk_boost")) s.sun_disk_boost = channels_from_json(j["sun_disk_boost"]);
        if (j.contains("ground_illumination"))
            s.ground_illumination = channels_from_json(j["ground_illumination"]);
        if (j.contains("texture")) {
            const auto& t = j["texture"];
            if (t.contains("base_albedo")) s.texture.base_albedo = channels_from_json(t["base_albedo"]);
            s.texture.contrast = t.value("contrast", s.texture.contrast);
            s.texture.scale = t.value("scale", s.texture.scale);
            s.texture.octaves = t.value("octaves", s.texture.octaves);
        }
        if (j.contains("puddles"))
            for (const auto& jp : j["puddles"]) {
                PuddleSpec p;
                p.center_x = jp.at("center_x_m").get<double>();
                p.center_z = jp.at("center_z_m").get<double>();
                p.radius_x = jp.at("radius_x_m").get<double>();
                p.radius_z = jp.at("radius_z_m").get<double>();
                if (jp.contains("mu_absorption")) {
                    p.column.mu_particles = channels_from_json(jp.at("mu_particles"));
                    p.column.mu_bottom = channels_from_json(jp.at("mu_bottom"));
                    p.column.mu_absorption = channels_from_json(jp.at("mu_absorption"));
                }
                s.puddles.push_back(p);
            }
        s.polarizer_transmittance = j.value("polarizer_transmittance", s.polarizer_transmittance);
        s.exposure = j.value("exposure", s.exposure);
        s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
        s.seed = j.value("seed", s.seed);
        s.noise_stream = j.value("noise_stream", s.noise_stream);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid scene spec: ") + e.what());
    }
    if (s.width <= 0 || s.height <= 0) throw std::runtime_error("invalid scene spec: width/height");
    if (s.focal_length <= 0) throw std::runtime_error("invalid scene spec: focal_length_px");
    if (s.baseline <= 0) throw std::runtime_error("invalid scene spec: baseline_m");
    if (s.camera_height <= 0) throw std::runtime_error("invalid scene spec: camera_height_m");
    return s;
}

SceneSpec load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return scene_from_json(j);
}

}  // namespace pw::synth
