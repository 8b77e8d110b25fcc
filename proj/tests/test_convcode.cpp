#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ncma/convcode.hpp"

using namespace ncma;

namespace {

// Independent encoder oracle: explicit shift register holding the six most
// recent past bits (front = newest), taps listed by delay instead of the
// window/mask form the library uses.  133 octal taps delays {0,2,3,5,6},
// 171 octal taps {0,1,2,3,6}.
BitVec encode_oracle(const BitVec& frame) {
    constexpr int taps0[] = {0, 2, 3, 5, 6};
    constexpr int taps1[] = {0, 1, 2, 3, 6};
    std::deque<std::uint8_t> reg(6, 0);
    BitVec out;
    auto step = [&](std::uint8_t bit) {
        auto at = [&](int d) { return d == 0 ? bit : reg[d - 1]; };
        std::uint8_t c0 = 0, c1 = 0;
        for (int d : taps0) c0 ^= at(d);
        for (int d : taps1) c1 ^= at(d);
        out.push_back(c0);
        out.push_back(c1);
        reg.push_front(bit);
        reg.pop_back();
    };
    for (std::uint8_t b : frame) step(b);
    for (unsigned t = 0; t < kConvTailBits; ++t) step(0);
    return out;
}

// Exhaustive maximum-likelihood oracle.  Frames are enumerated in
// lexicographic order and only strictly better metrics replace the
// incumbent, so ties resolve to the lexicographically smallest frame —
// the same rule viterbi_decode declares.
BitVec ml_oracle(const std::vector<std::uint8_t>& soft, unsigned info) {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    BitVec winner;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << info); ++v) {
        BitVec frame(info);
        for (unsigned i = 0; i < info; ++i)
            frame[i] = static_cast<std::uint8_t>((v >> (info - 1 - i)) & 1u);
        const BitVec coded = conv_encode(frame);
        std::int64_t m = 0;
        for (std::size_t k = 0; k < coded.size(); ++k)
            m += (static_cast<int>(soft[k]) - 128) * (coded[k] ? -1 : 1);
        if (m > best) {
            best = m;
            winner = frame;
        }
    }
    return winner;
}

BitVec random_bits(std::size_t n, std::mt19937_64& rng) {
    BitVec v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng() & 1u);
    return v;
}

// Noiseless soft mapping: coded bit 0 -> high byte, bit 1 -> low byte.
std::vector<std::uint8_t> hard_soft(const BitVec& coded, std::uint8_t hi,
                                    std::uint8_t lo) {
    std::vector<std::uint8_t> soft(coded.size());
    for (std::size_t k = 0; k < coded.size(); ++k) soft[k] = coded[k] ? lo : hi;
    return soft;
}

}  // namespace

TEST_CASE("bytes_to_bits is MSB first and bits_to_bytes inverts it") {
    const std::vector<std::uint8_t> bytes = {0xA5, 0x01};
    const BitVec bits = bytes_to_bits(bytes);
    CHECK(bits == BitVec{1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1});
    CHECK(bits_to_bytes(bits) == bytes);
    CHECK_THROWS_AS(bits_to_bytes(BitVec(7, 0)), std::invalid_argument);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::uint8_t> raw(1 + rng() % 40);
        for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
        CHECK(bits_to_bytes(bytes_to_bits(raw)) == raw);
    }
}

TEST_CASE("encoder impulse response reads out the generators") {
    // A single 1 followed by the six tail zeros walks the impulse through
    // every tap: branch outputs spell 133/171 octal column by column.
    const BitVec imp = conv_encode({1});
    CHECK(imp == BitVec{1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1});
}

TEST_CASE("encoder matches the shift-register oracle") {
    std::mt19937_64 rng(11);
    CHECK(conv_encode({}) == encode_oracle({}));
    for (int t = 0; t < 200; ++t) {
        const BitVec frame = random_bits(1 + rng() % 120, rng);
        const BitVec coded = conv_encode(frame);
        CHECK(coded.size() == 2 * (frame.size() + kConvTailBits));
        CHECK(coded == encode_oracle(frame));
    }
}

TEST_CASE("encoder is linear over GF(2)") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 80;
        const BitVec a = random_bits(n, rng);
        const BitVec b = random_bits(n, rng);
        BitVec ab(n);
        for (std::size_t i = 0; i < n; ++i) ab[i] = a[i] ^ b[i];
        const BitVec ca = conv_encode(a), cb = conv_encode(b);
        BitVec want(ca.size());
        for (std::size_t i = 0; i < ca.size(); ++i) want[i] = ca[i] ^ cb[i];
        CHECK(conv_encode(ab) == want);
    }
}

TEST_CASE("noiseless roundtrip through the decoder") {
    std::mt19937_64 rng(17);
    for (std::size_t n : {std::size_t{1}, std::size_t{24}, std::size_t{64},
                          std::size_t{200}}) {
        for (int t = 0; t < 10; ++t) {
            const BitVec frame = random_bits(n, rng);
            const BitVec coded = conv_encode(frame);
            CHECK(viterbi_decode(hard_soft(coded, 255, 0)) == frame);
            // Same signs at the quantizer's saturated working levels.
            CHECK(viterbi_decode(hard_soft(coded, 186, 69)) == frame);
        }
    }
}

TEST_CASE("up to three hard coded-bit errors are always corrected") {
    // The free distance is 10, so any pattern of weight <= 4 is closer to
    // the transmitted codeword than to every other one (frames of 7+ bits).
    std::mt19937_64 rng(19);
    for (int t = 0; t < 100; ++t) {
        const BitVec frame = random_bits(8 + rng() % 56, rng);
        auto soft = hard_soft(conv_encode(frame), 255, 0);
        for (int e = 0; e < 3; ++e) {
            const std::size_t k = rng() % soft.size();
            soft[k] = static_cast<std::uint8_t>(255 - soft[k]);
        }
        CHECK(viterbi_decode(soft) == frame);
    }
}

TEST_CASE("decoder matches the exhaustive oracle, ties included") {
    std::mt19937_64 rng(23);

    SUBCASE("uniform random soft values") {
        for (unsigned info = 1; info <= 10; ++info) {
            for (int t = 0; t < 12; ++t) {
                std::vector<std::uint8_t> soft(2 * (info + kConvTailBits));
                for (auto& b : soft) b = static_cast<std::uint8_t>(rng());
                CHECK(viterbi_decode(soft) == ml_oracle(soft, info));
            }
        }
    }

    SUBCASE("near-tie soft values from a three-level alphabet") {
        // Values close to the 128 midpoint make equal path metrics common,
        // exercising the lexicographic tie rule rather than the metric.
        const std::uint8_t levels[] = {118, 128, 138};
        for (unsigned info : {4u, 6u, 8u}) {
            for (int t = 0; t < 40; ++t) {
                std::vector<std::uint8_t> soft(2 * (info + kConvTailBits));
                for (auto& b : soft) b = levels[rng() % 3];
                CHECK(viterbi_decode(soft) == ml_oracle(soft, info));
            }
        }
    }

    SUBCASE("all-erased input decodes to the all-zero frame") {
        // Every codeword scores zero; the lexicographically smallest frame
        // wins.
        for (unsigned info : {1u, 5u, 16u}) {
            const std::vector<std::uint8_t> soft(2 * (info + kConvTailBits),
                                                 128);
            CHECK(viterbi_decode(soft) == BitVec(info, 0));
        }
    }
}

TEST_CASE("decoder rejects malformed soft input") {
    CHECK_THROWS_AS(viterbi_decode(std::vector<std::uint8_t>(13, 128)),
                    std::invalid_argument);
    CHECK_THROWS_AS(viterbi_decode(std::vector<std::uint8_t>(12, 128)),
                    std::invalid_argument);
    CHECK_THROWS_AS(viterbi_decode({}), std::invalid_argument);
}

TEST_CASE("frozen CRC-32 check values") {
    // Bit-serial, poly 0x04C11DB7, init all-ones, final complement, bytes
    // fed MSB first: the standard check string gives 0xFC891918.
    const std::vector<std::uint8_t> check = {'1', '2', '3', '4', '5',
                                             '6', '7', '8', '9'};
    CHECK(crc32_bits(bytes_to_bits(check)) == 0xFC891918u);
    CHECK(crc32_bits(BitVec(24, 0)) == 0x489B82FFu);
}

TEST_CASE("append_crc / crc_check roundtrip and corruption detection") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 100; ++t) {
        const BitVec payload = random_bits(8 + rng() % 120, rng);
        const BitVec frame = append_crc(payload);
        CHECK(frame.size() == payload.size() + kCrcBits);
        CHECK(crc_check(frame));

        BitVec bad = frame;
        bad[rng() % bad.size()] ^= 1u;  // payload or checksum field alike
        CHECK_FALSE(crc_check(bad));
    }
    CHECK_FALSE(crc_check(BitVec(kCrcBits - 1, 0)));
}

TEST_CASE("crc_check_xor accepts exactly the XOR of two valid frames") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 8 + rng() % 120;
        const BitVec fa = append_crc(random_bits(n, rng));
        const BitVec fb = append_crc(random_bits(n, rng));
        BitVec fx(fa.size());
        for (std::size_t i = 0; i < fa.size(); ++i) fx[i] = fa[i] ^ fb[i];

        CHECK(crc_check_xor(fx));
        // The affine offset makes the plain check always fail on an XOR
        // frame, and the XOR check fail on a plain frame.
        CHECK_FALSE(crc_check(fx));
        CHECK_FALSE(crc_check_xor(fa));

        BitVec bad = fx;
        bad[rng() % bad.size()] ^= 1u;
        CHECK_FALSE(crc_check_xor(bad));
    }
}
