#pragma once

#include <cstdint>

#include "atraj/geometry.hpp"

namespace atraj {

/// Counter-based random stream: draw k of stream s under a seed is a pure
/// function mix(seed, s, k) built from the splitmix64 finalizer, so streams
/// can be consumed in any order without affecting each other.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream);

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01();

    /// Gaussian via Box-Muller (pairs cached within the stream).
    double normal(double sigma = 1.0);

    /// Uniform direction on the unit sphere (normalized Gaussian triple).
    Vec3 isotropic_unit();

    std::uint64_t next_bits();

private:
    std::uint64_t state0_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Noise channels draw from disjoint streams keyed by (channel, camera).
enum class NoiseChannel : std::uint64_t {
    Pixel = 1,
    RotationSystematic = 2,
    RotationRandom = 3,
    PositionSystematic = 4,
    PositionRandom = 5,
};

std::uint64_t noise_stream(NoiseChannel channel, int camera);

}  // namespace atraj
