#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace rootflow {

// Philox4x32-10 counter-based generator. A draw is a pure function of
// (seed, stream, index), so any partition of the counter space across
// workers reproduces the serial sequence.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed) : key_{lo(seed), hi(seed)} {}

    static Block bijection(Block ctr, std::array<std::uint32_t, 2> key);

    Block block(std::uint64_t stream, std::uint64_t index) const {
        return bijection({lo(index), hi(index), lo(stream), hi(stream)}, key_);
    }

    // Two independent uniforms in (0, 1) from one block.
    std::pair<double, double> uniform2(std::uint64_t stream, std::uint64_t index) const;
    // Two independent standard normals (Box-Muller).
    std::pair<double, double> normal2(std::uint64_t stream, std::uint64_t index) const;

private:
    static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
    static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

    std::array<std::uint32_t, 2> key_;
};

}  // namespace rootflow
