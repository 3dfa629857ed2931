#ifndef PAM_RNG_HPP
#define PAM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pam {

// Counter-based randomness: every variate is a pure function of
// (seed, stream, index), so results do not depend on evaluation order or on
// how work is split across threads.
namespace rng {

inline std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = splitmix(seed ^ 0x243f6a8885a308d3ULL);
    h = splitmix(h ^ stream);
    h = splitmix(h ^ index);
    return h;
}

/// Uniform on [0,1) from a 64-bit word.
inline double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Uniform on (0,1] (safe for logarithms).
inline double to_unit_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two counter-derived uniforms.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    double u1 = to_unit_open(hash3(seed, stream, 2 * index));
    double u2 = to_unit(hash3(seed, stream, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace rng
} // namespace pam

#endif
