#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace wzlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every output is a pure function of (key, counter), so any sample of any
/// stream can be regenerated independently of evaluation order or thread.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit constexpr Philox4x32(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    [[nodiscard]] constexpr Block operator()(Block ctr) const noexcept {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    /// Block for counter `index` in stream `stream`.
    [[nodiscard]] constexpr Block at(std::uint64_t stream, std::uint64_t index) const noexcept {
        return (*this)(Block{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                             static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Block single_round(const Block& c, const std::array<std::uint32_t, 2>& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return Block{hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    std::array<std::uint32_t, 2> key_;
};

/// Uniform in the open interval (0, 1): the top 52 of 64 random bits, offset by half a step.
[[nodiscard]] inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Two independent uniforms in (0,1) for counter `index` of `stream`.
[[nodiscard]] inline std::array<double, 2> uniform_pair(const Philox4x32& gen, std::uint64_t stream,
                                                        std::uint64_t index) noexcept {
    const auto b = gen.at(stream, index);
    return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
}

/// Two independent standard normals (Box-Muller) for counter `index` of `stream`.
[[nodiscard]] inline std::array<double, 2> normal_pair(const Philox4x32& gen, std::uint64_t stream,
                                                       std::uint64_t index) noexcept {
    const auto [u1, u2] = uniform_pair(gen, stream, index);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phase), r * std::sin(phase)};
}

// Stream namespaces keep Wiener samples and audit points from sharing counters.
inline constexpr std::uint64_t kWienerStreamBase = 0;
inline constexpr std::uint64_t kAuditStreamBase = std::uint64_t{1} << 62;

}  // namespace wzlab
