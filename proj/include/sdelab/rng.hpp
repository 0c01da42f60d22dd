#pragma once

#include <cstdint>
#include <random>

namespace sdelab {

// splitmix64 step; used only to mix seeds, never as the sampling stream.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct RngSpec {
    std::uint64_t master_seed = 0;

    // Substream seed for one path. Pure function of (master_seed, path_index),
    // so the draw sequence is independent of worker scheduling.
    std::uint64_t stream_seed(std::uint64_t path_index) const {
        return splitmix64(splitmix64(master_seed) ^ splitmix64(path_index + 0x632BE59BD9B4E019ULL));
    }
};

// Per-path random stream. mt19937_64 is fully specified by the standard, and
// the Box-Muller transform below uses only explicit arithmetic, so the draw
// sequence is bit-exact for a fixed (master_seed, path_index).
//
// Draw order contract: callers take standard normals one at a time; an
// ensemble consumes (optional x0 draws first, then per step the m noise
// components in component order).
class PathRng {
public:
    PathRng(const RngSpec& spec, std::uint64_t path_index)
        : gen_(spec.stream_seed(path_index)) {}

    explicit PathRng(std::uint64_t raw_seed) : gen_(raw_seed) {}

    // Uniform on (0,1]; the open left end keeps log(u) finite.
    double uniform_open0() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [0,1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open0();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace sdelab
