#pragma once

// Philox4x32-10 counter-based generator and per-walker random streams.

#include <array>
#include <cstdint>

namespace drainage {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection of `counter` under `key`.
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

/// Independent stream number `stream` under a 64-bit seed. Draw k uses the
/// counter (k_lo, k_hi, stream_lo, stream_hi), so streams never overlap and
/// the values depend only on (seed, stream, k).
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform on (0, 1) with 53 random bits; never 0 or 1.
    double uniform();
    /// Standard normal by the Box-Muller transform.
    double normal();
    std::uint64_t blocks_used() const { return block_index_; }

private:
    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    PhiloxBlock buffer_{};
    int buffered_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace drainage
