#pragma once

#include <cmath>
#include <cstdint>

namespace pw::synth {

/// Seeded lattice value noise with fractal octaves; pure function of
/// (seed, x, y) so renders are reproducible.
class ValueNoise {
public:
    explicit ValueNoise(std::uint64_t seed) : seed_(seed) {}

    /// In [0, 1].
    double sample(double x, double y) const {
        const double x0 = std::floor(x);
        const double y0 = std::floor(y);
        const double fx = smooth(x - x0);
        const double fy = smooth(y - y0);
        const auto ix = static_cast<std::int64_t>(x0);
        const auto iy = static_cast<std::int64_t>(y0);
        const double v00 = lattice(ix, iy);
        const double v10 = lattice(ix + 1, iy);
        const double v01 = lattice(ix, iy + 1);
        const double v11 = lattice(ix + 1, iy + 1);
        return v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) +
               v01 * (1 - fx) * fy + v11 * fx * fy;
    }

    /// Fractal sum of `octaves` doublings, normalized to [0, 1].
    double fractal(double x, double y, int octaves) const {
        double total = 0.0;
        double amplitude = 1.0;
        double norm = 0.0;
        double freq = 1.0;
        for (int o = 0; o < octaves; ++o) {
            total += amplitude * sample(x * freq, y * freq);
            norm += amplitude;
            amplitude *= 0.5;
            freq *= 2.0;
        }
        return total / norm;
    }

private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

    double lattice(std::int64_t x, std::int64_t y) const {
        std::uint64_t h = seed_;
        h ^= static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull;
        h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ull;
        h ^= static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4Full;
        h = (h ^ (h >> 27)) * 0x94D049BB133111EBull;
        h ^= h >> 31;
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed_;
};

}  // namespace pw::synth
