#pragma once

#include <array>
#include <cstdint>

namespace krsim {

// Philox4x64-10 block function (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3").
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

// Counter-based stream keyed by (master_seed, stream_id). Draws are a pure
// function of (key, step, position-within-step): begin_step(t) must be called
// once per map iteration, after which the sequence of values for that step is
// fixed regardless of any earlier history. Distinct stream ids give
// statistically independent streams; a resumed run re-issues identical draws.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{master_seed, stream_id} {}

    void begin_step(std::uint64_t step) {
        step_ = step;
        block_ = 0;
        pos_ = 4;
    }

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buf_ = philox4x64({step_, block_++, 0, 0}, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t master_seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }

private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t step_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    int pos_ = 4;
};

// Stateless mix for deriving secondary seeds (e.g. the random-phase twin of a
// trajectory run); splitmix64 finalizer.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace krsim
