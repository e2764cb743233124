#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace engel {

// Arbitrary-precision signed integer. GMP supplies the arithmetic; zero has
// the unique representation mpz guarantees, and every operation is exact.
using BigInt = mpz_class;

inline std::string to_string(const BigInt& v) { return v.get_str(); }

// Strict decimal parser: optional '-', then digits, nothing else. mpz's own
// string constructor tolerates whitespace, which we do not want.
inline BigInt parse_bigint(std::string_view text) {
    std::string_view digits = text;
    if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
    if (digits.empty()) throw std::invalid_argument("empty integer literal");
    for (char c : digits) {
        if (c < '0' || c > '9')
            throw std::invalid_argument("bad integer literal: '" + std::string(text) + "'");
    }
    return BigInt(std::string(text), 10);
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
    BigInt r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
    BigInt r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Least common multiple of a non-empty list of positive integers.
inline BigInt lcm_all(const std::vector<BigInt>& values) {
    if (values.empty()) throw std::invalid_argument("lcm_all: empty list");
    BigInt acc = 1;
    for (const BigInt& v : values) {
        if (v <= 0) throw std::invalid_argument("lcm_all: nonpositive entry " + to_string(v));
        acc = lcm(acc, v);
    }
    return acc;
}

inline bool fits_uint64(const BigInt& v) {
    return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_uint64(const BigInt& v) {
    // mpz_get_ui truncates to unsigned long; export limbs to stay exact on
    // any platform.
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
    return out;
}

// FNV-1a over the sign and limbs; used to key chip configurations.
inline std::size_t hash_bigint(const BigInt& v, std::size_t seed = 1469598103934665603ull) {
    auto mix = [&seed](std::uint64_t x) {
        seed ^= x;
        seed *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(sgn(v)) + 2);
    const mpz_srcptr z = v.get_mpz_t();
    const std::size_t limbs = mpz_size(z);
    for (std::size_t i = 0; i < limbs; ++i) mix(mpz_getlimbn(z, static_cast<mp_size_t>(i)));
    return seed;
}

struct BigIntVectorHash {
    std::size_t operator()(const std::vector<BigInt>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (const BigInt& x : v) h = hash_bigint(x, h);
        return h;
    }
};

}  // namespace engel
