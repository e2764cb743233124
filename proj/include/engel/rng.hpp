#pragma once

#include <cstdint>
#include <vector>

#include "engel/bigint.hpp"

namespace engel {

// splitmix64; used only to expand a user seed into xoshiro state.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). Chosen because it is tiny, fully
// specified, and reproduces bit-for-bit on any platform; the unit suite
// freezes test vectors for it.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& word : s_) word = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased uniform draw from [0, bound) by rejection. bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform draw from [0, bound) for arbitrary-precision bounds. Draws
    // ceil(nb/64) words LSB-first (nb = bit length of bound-1), masks the top
    // word down to nb bits, and rejects values >= bound. This exact
    // discipline is part of the reproducibility contract.
    BigInt below(const BigInt& bound) {
        if (bound <= 0) throw std::invalid_argument("below: bound must be positive");
        if (bound == 1) return 0;
        const BigInt top = bound - 1;
        const std::size_t nb = mpz_sizeinbase(top.get_mpz_t(), 2);
        const std::size_t words = (nb + 63) / 64;
        const unsigned top_bits = static_cast<unsigned>(nb - 64 * (words - 1));
        const std::uint64_t top_mask =
            top_bits == 64 ? ~0ull : ((std::uint64_t{1} << top_bits) - 1);
        for (;;) {
            BigInt value = 0;
            for (std::size_t i = 0; i < words; ++i) {
                std::uint64_t w = next();
                if (i + 1 == words) w &= top_mask;
                BigInt chunk(static_cast<unsigned long>(w >> 32));
                chunk <<= 32;
                chunk += static_cast<unsigned long>(w & 0xffffffffull);
                chunk <<= 64 * i;
                value += chunk;
            }
            if (value < bound) return value;
        }
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

}  // namespace engel
