#pragma once

#include <array>
#include <cstdint>

namespace vrcoint {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure; exposed for
/// known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream keyed by (seed, stream_id).
///
/// The sequence of a stream depends only on its two keys, so replication r of
/// a Monte Carlo run draws the same numbers no matter which worker executes
/// it or how many other streams were consumed before.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    /// Standard normal via Box-Muller; both variates of a pair are used.
    double normal() noexcept;

    // UniformRandomBitGenerator surface
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next_u64(); }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;  // remaining 64-bit words in buffer_ (0, 1 or 2)
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace vrcoint
