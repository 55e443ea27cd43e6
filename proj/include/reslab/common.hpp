#ifndef RESLAB_COMMON_HPP
#define RESLAB_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace reslab {

// ---------------------------------------------------------------------------
// Error types. Hard failures throw; recoverable conditions are carried as
// flags on the result structs (alias_warning, floor_reached, ...).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHyperbolic : Error { using Error::Error; };
struct ConeConditionFailed : Error { using Error::Error; };
struct BadPerturbation : Error { using Error::Error; };
struct CountCapExceeded : Error { using Error::Error; };
struct NewtonDiverged : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct CountMismatch : Error { using Error::Error; };
struct DegenerateLeading : Error { using Error::Error; };
struct MomentSystemSingular : Error { using Error::Error; };
struct SupportOverlap : Error { using Error::Error; };
struct NotMeanZero : Error { using Error::Error; };
struct UntrustedSpectrum : Error { using Error::Error; };
struct NoUnitEigenvalue : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Torus arithmetic. Canonical representative is [0,1)^2; reductions use
// round-to-nearest subtraction so values a hair below an integer do not
// land on the excluded endpoint.
// ---------------------------------------------------------------------------

/// Reduce to the canonical representative in [0,1).
inline double wrap_unit(double u) {
    double w = u - std::floor(u);
    if (w >= 1.0) w -= 1.0;   // floor rounding can leave exactly 1.0
    return w;
}

/// Signed representative in [-0.5, 0.5): u minus the nearest integer.
inline double wrap_sym(double u) {
    double w = u - std::round(u);
    if (w >= 0.5) w -= 1.0;
    if (w < -0.5) w += 1.0;
    return w;
}

// ---------------------------------------------------------------------------
// Deterministic parallel loop. Thread count is capped by RESLAB_THREADS.
// Work is split into contiguous index blocks; callers must write to
// disjoint slots so the result is independent of the partition.
// ---------------------------------------------------------------------------

unsigned thread_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// ---------------------------------------------------------------------------
// FNV-1a 64-bit content hash, used to stamp output files with the map they
// were produced from.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal form of a double (deterministic across runs).
std::string format_double(double v);

} // namespace reslab

#endif
