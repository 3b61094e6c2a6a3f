#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every
// (key, counter) pair maps to an independent 128-bit block, so a path can
// address its random numbers directly by (path, step) with no shared state.

namespace vbarrier {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

// Uniform on the open interval (0, 1): 52 random bits plus half a unit, so
// both ends are excluded exactly (53 bits would round up to 1.0).
constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Random numbers for one Monte Carlo path. Normals are drawn sequentially
// (two per Philox block, Box-Muller); uniforms are addressed by index in a
// separate counter domain so optional draws never shift the normal stream.
class PathRandom {
public:
    PathRandom(std::uint64_t seed, std::uint64_t path) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const PhiloxCounter out = philox4x32_10({block_++, 0u, path_lo_, path_hi_}, key_);
        const double u1 = to_open_unit(out[0], out[1]);
        const double u2 = to_open_unit(out[2], out[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double uniform(std::uint32_t index) const noexcept {
        const PhiloxCounter out = philox4x32_10({index, 1u, path_lo_, path_hi_}, key_);
        return to_open_unit(out[0], out[1]);
    }

private:
    PhiloxKey key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint32_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace vbarrier
