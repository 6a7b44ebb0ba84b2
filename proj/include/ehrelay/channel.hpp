#pragma once

#include <array>
#include <cstdint>

namespace ehrelay {

/// xoshiro256** generator. Seeded through SplitMix64; supports a 2^128-step
/// jump, which is what makes reproducible per-worker substreams possible.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits. The largest value is
    /// 1 - 2^-53, the double just below 1.
    double next_uniform();

    /// Unit-mean exponential variate by inversion, -ln(1 - U).
    double next_exponential();

    /// Advances the state by 2^128 draws.
    void jump();

    bool operator==(const Rng&) const = default;

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Fading power gains of one block: |h|^2 on source->relay, |g|^2 on
/// relay->destination. Both are unit-mean exponential under Rayleigh fading.
struct ChannelBlock {
    double h2 = 0.0;
    double g2 = 0.0;
};

ChannelBlock draw_block(Rng& rng);

/// Substream for a worker: the base stream advanced by worker_index jumps.
/// Index 0 is the base stream itself.
Rng split_stream(const Rng& base, std::uint64_t worker_index);

}  // namespace ehrelay
