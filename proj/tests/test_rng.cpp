#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "engel/rng.hpp"

using engel::BigInt;
using engel::SplitMix64;
using engel::Xoshiro256pp;

// Frozen vectors: cross-checked against an independent reimplementation of
// both generators. Any platform or refactor that changes a single bit of the
// stream fails here before it can silently change seeded runs elsewhere.

TEST_CASE("splitmix64 reproduces its reference stream") {
    SplitMix64 zero{0};
    CHECK(zero.next() == 16294208416658607535ull);  // 0xE220A8397B1DCDAF
    CHECK(zero.next() == 7960286522194355700ull);
    CHECK(zero.next() == 487617019471545679ull);
    CHECK(zero.next() == 17909611376780542444ull);

    SplitMix64 one{1};
    CHECK(one.next() == 10451216379200822465ull);
    CHECK(one.next() == 13757245211066428519ull);
    CHECK(one.next() == 17911839290282890590ull);
    CHECK(one.next() == 8196980753821780235ull);
}

TEST_CASE("xoshiro256++ stream is pinned per seed") {
    Xoshiro256pp a(1);
    CHECK(a.next() == 14971601782005023387ull);
    CHECK(a.next() == 13781649495232077965ull);
    CHECK(a.next() == 1847458086238483744ull);
    CHECK(a.next() == 13765271635752736470ull);
    CHECK(a.next() == 3406718355780431780ull);

    Xoshiro256pp b(42);
    CHECK(b.next() == 15021278609987233951ull);
    CHECK(b.next() == 5881210131331364753ull);
    CHECK(b.next() == 18149643915985481100ull);
    CHECK(b.next() == 12933668939759105464ull);
    CHECK(b.next() == 14637574242682825331ull);
}

TEST_CASE("same seed, same stream; different seed, different stream") {
    Xoshiro256pp a(9);
    Xoshiro256pp b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    Xoshiro256pp c(10);
    bool all_equal = true;
    Xoshiro256pp a2(9);
    for (int i = 0; i < 100; ++i) all_equal = all_equal && (a2.next() == c.next());
    CHECK_FALSE(all_equal);
}

TEST_CASE("below(u64) is pinned and in range") {
    Xoshiro256pp x(1);
    const std::vector<std::uint64_t> expected{7, 5, 4, 0, 0, 5, 3, 5};
    for (std::uint64_t want : expected) CHECK(x.below(std::uint64_t{10}) == want);

    Xoshiro256pp y(123);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t bound = 1 + y.next() % 1000;
        CHECK(y.below(bound) < bound);
    }
    Xoshiro256pp z(5);
    for (int i = 0; i < 100; ++i) CHECK(z.below(std::uint64_t{1}) == 0);
}

TEST_CASE("below(BigInt) follows the chunked draw discipline exactly") {
    Xoshiro256pp x(7);
    const BigInt bound("1000000000000000000000000");  // 10^24, two 64-bit words
    CHECK(x.below(bound) == BigInt("746503860394681659461949"));
    CHECK(x.below(bound) == BigInt("5842408070485453854834"));
    CHECK(x.below(bound) == BigInt("928128810961123006808950"));
}

TEST_CASE("below(BigInt) falls in range for many bounds") {
    Xoshiro256pp x(99);
    BigInt bound = 1;
    for (int i = 0; i < 200; ++i) {
        bound = bound * 37 + 11;  // grows past any machine word
        const BigInt draw = x.below(bound);
        CHECK(draw >= 0);
        CHECK(draw < bound);
    }
    CHECK(x.below(BigInt(1)) == 0);
    CHECK_THROWS_AS(x.below(BigInt(0)), std::invalid_argument);
    CHECK_THROWS_AS(x.below(BigInt(-3)), std::invalid_argument);
}

TEST_CASE("below(BigInt) masks single-word power-of-two bounds without rejection") {
    // With bound 2^16 the draw is one masked word, so it must equal the raw
    // stream masked to 16 bits, one output per call.
    Xoshiro256pp c(32);
    Xoshiro256pp d(32);
    for (int i = 0; i < 500; ++i)
        CHECK(c.below(BigInt(1) << 16) ==
              BigInt(static_cast<unsigned long>(d.next() & 0xffffull)));
}

TEST_CASE("uniform01 is pinned and sits in [0, 1)") {
    Xoshiro256pp x(3);
    CHECK(x.uniform01() == Catch::Approx(0.05145141894999983).epsilon(1e-15));
    CHECK(x.uniform01() == Catch::Approx(0.6479175461992682).epsilon(1e-15));
    CHECK(x.uniform01() == Catch::Approx(0.8670140659459231).epsilon(1e-15));
    for (int i = 0; i < 10000; ++i) {
        const double v = x.uniform01();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("below() draws look uniform") {
    Xoshiro256pp x(2024);
    const int buckets = 10;
    std::vector<int> hits(buckets, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        ++hits[static_cast<std::size_t>(x.below(std::uint64_t{buckets}))];
    for (int h : hits) {
        CHECK(h > draws / buckets - 600);  // ~6 sigma
        CHECK(h < draws / buckets + 600);
    }
}
