#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tsom {

inline constexpr double kPi = 3.14159265358979323846;

// Invalid arguments / broken invariants (CLI exit code 3).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Filesystem / decode failures (CLI exit code 2).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A mathematical guarantee observed to fail (CLI exit code 4).
class PropertyViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

// SplitMix64: deterministic integer hash used for procedural textures.
inline std::uint64_t hash64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Map a 64-bit word to [0,1) with full 53-bit mantissa resolution.
// Used instead of std::uniform_real_distribution, whose output stream is
// implementation-defined and would break cross-build reproducibility.
inline double u01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace tsom
