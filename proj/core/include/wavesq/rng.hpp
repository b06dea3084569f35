#pragma once

#include <cmath>
#include <cstdint>

namespace wavesq {

// Deterministic 64-bit generator (splitmix64). Used instead of <random>
// engines because every bit of its output is specified right here, so results
// do not depend on the standard library implementation.
//
// state advances by the golden-ratio increment; each output is the finalizer
//   z ^= z>>30, z *= 0xBF58476D1CE4E5B9, z ^= z>>27, z *= 0x94D049BB133111EB,
//   z ^= z>>31
// applied to the new state.
class rng {
public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform on [0,1): top 53 bits scaled by 2^-53
    double next_uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double a, double b) {
        return a + (b - a) * next_uniform01();
    }

    // Standard normal via Box-Muller: consumes exactly two uniforms per pair
    // of draws and caches the sine branch, so the draw count per call is
    // fixed (no rejection loop) and sequences stay reproducible.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform01();
        double u2 = next_uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53; // keep log finite on the zero draw
        const double two_pi = 6.283185307179586476925286766559;
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = two_pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Per-replication seed: mix the master seed with the replication index through
// the splitmix64 finalizer. Replication streams are therefore independent of
// scheduling/thread assignment.
inline std::uint64_t derive_seed(std::uint64_t master_seed,
                                 std::uint64_t rep_index) {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (rep_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace wavesq
