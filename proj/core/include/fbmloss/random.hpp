#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fbm {

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Stateless: a 128-bit counter and a 64-bit key
/// map to four 32-bit words.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Inverse of the standard normal CDF (Wichura's AS241, about 1e-16 relative).
/// Requires 0 < p < 1.
double normal_quantile(double p);

/// Identifies one Gaussian stream: the experiment seed and the replication.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Deterministic stream of i.i.d. N(0,1) variates.
///
/// Variate k of stream (seed, s) is the normal quantile of a 53-bit uniform
/// taken from Philox block (counter = {k/2 lo, k/2 hi, s lo, s hi}, key = seed).
/// The output depends only on (seed, s, k), so it is identical across runs,
/// thread counts and consumption patterns. Not thread-safe; give each
/// replication its own source.
class GaussianSource {
public:
    explicit GaussianSource(SeedSpec seed) noexcept : seed_(seed) {}

    const SeedSpec& seed() const noexcept { return seed_; }
    std::uint64_t position() const noexcept { return position_; }

    double next();
    void fill(std::span<double> out);

    /// Uniform on the open interval (0, 1) at the current position; advances.
    double next_uniform() noexcept;

private:
    SeedSpec seed_;
    std::uint64_t position_ = 0;
};

} // namespace fbm
