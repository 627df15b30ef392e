#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levy {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit key is the master seed and the upper half of the 128-bit counter
// is a stream index, so (seed, stream) names an independent substream and the
// lower half counts blocks within it. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // The bijection itself: ten rounds applied to a counter block under a key.
    static Block encrypt(Block counter, Key key);

private:
    Key key_;
    Block counter_;
    Block buffer_{};
    int used_ = 4;
};

}  // namespace levy
