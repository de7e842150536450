#pragma once

// Counter-based random numbers: Philox4x32-10 with one independent stream
// per simulation path.  Any path can be regenerated in isolation, which makes
// batched and threaded runs reproducible by construction.

#include <array>
#include <cstdint>

#include "hhw/black_scholes.hpp"

namespace hhw {

namespace philox {

// One Philox4x32-10 block: 4 counter words + 2 key words -> 4 output words.
inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0;; ++round) {
        const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32);
        const std::uint32_t lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32);
        const std::uint32_t lo1 = std::uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        if (round == 9)
            break;
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

} // namespace philox

// Sequential view of one path's stream.  The path index lives in the upper
// counter words, the block index in the lower ones, the seed in the key.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          path_lo_(std::uint32_t(path)), path_hi_(std::uint32_t(path >> 32)) {}

    // Uniform on (0, 1), 53 random bits, never exactly 0 or 1.
    double uniform() {
        const std::uint32_t w0 = next_word();
        const std::uint32_t w1 = next_word();
        const std::uint64_t bits = (std::uint64_t(w0) << 32) | w1;
        return double(bits >> 11) * 0x1p-53 + 0x1p-54;
    }

    double normal() { return norm_cdf_inv(uniform()); }

private:
    std::uint32_t next_word() {
        if (idx_ == 4) {
            buf_ = philox::block({std::uint32_t(blk_),
                                  std::uint32_t(blk_ >> 32), path_lo_,
                                  path_hi_},
                                 key_);
            ++blk_;
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t path_lo_, path_hi_;
    std::uint64_t blk_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
};

} // namespace hhw
