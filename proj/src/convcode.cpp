#include "ncma/convcode.hpp"

#include <array>
#include <bit>
#include <limits>
#include <stdexcept>

namespace ncma {

namespace {

// Generators in octal, tap masks over the 7-bit window (newest bit in the
// MSB): 0133 taps delays {0,2,3,5,6}, 0171 taps delays {0,1,2,3,6}.
constexpr unsigned kGen0 = 0133;
constexpr unsigned kGen1 = 0171;
constexpr unsigned kStates = 64;

inline std::uint8_t parity7(unsigned v) {
    return static_cast<std::uint8_t>(std::popcount(v & 0x7Fu) & 1u);
}

}  // namespace

BitVec bytes_to_bits(const std::vector<std::uint8_t>& bytes) {
    BitVec bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int k = 7; k >= 0; --k) bits.push_back((b >> k) & 1u);
    return bits;
}

std::vector<std::uint8_t> bits_to_bytes(const BitVec& bits) {
    if (bits.size() % 8 != 0)
        throw std::invalid_argument("bits_to_bytes: length not a byte multiple");
    std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        bytes[i / 8] = static_cast<std::uint8_t>((bytes[i / 8] << 1) | (bits[i] & 1u));
    return bytes;
}

BitVec conv_encode(const BitVec& frame) {
    BitVec out;
    out.reserve(2 * (frame.size() + kConvTailBits));
    unsigned window = 0;  // newest input bit at bit 6
    auto push = [&](unsigned bit) {
        window = ((bit & 1u) << 6) | (window >> 1);
        out.push_back(parity7(window & kGen0));
        out.push_back(parity7(window & kGen1));
    };
    for (std::uint8_t b : frame) push(b);
    for (unsigned t = 0; t < kConvTailBits; ++t) push(0);
    return out;
}

BitVec viterbi_decode(const std::vector<std::uint8_t>& soft) {
    if (soft.size() % 2 != 0 || soft.size() < 2 * (kConvTailBits + 1))
        throw std::invalid_argument("viterbi_decode: bad soft input length");
    const std::size_t steps = soft.size() / 2;
    const std::size_t info = steps - kConvTailBits;

    // State = the 6 most recent input bits, newest in bit 5.  The two
    // transitions into state ns share the input bit (ns >> 5) and differ in
    // the bit that leaves the window.
    struct Trans {
        std::uint8_t pred;
        std::uint8_t out0, out1;
    };
    static const auto table = [] {
        std::array<std::array<Trans, 2>, kStates> t{};
        for (unsigned ns = 0; ns < kStates; ++ns)
            for (unsigned z = 0; z < 2; ++z) {
                const unsigned window = (ns << 1) | z;
                t[ns][z] = {static_cast<std::uint8_t>(window & 0x3F),
                            parity7(window & kGen0), parity7(window & kGen1)};
            }
        return t;
    }();

    constexpr std::int64_t kNoPath = std::numeric_limits<std::int64_t>::min() / 4;
    std::vector<std::int64_t> metric(kStates, kNoPath), next(kStates);
    metric[0] = 0;  // encoder starts zeroed
    std::vector<std::array<std::uint8_t, kStates>> tb(steps);

    // Survivor bit prefix for `state` after `t` steps, using traceback
    // choices already fixed for earlier steps.  Only needed on metric ties.
    auto survivor_bits = [&](std::size_t t, unsigned state) {
        BitVec bits(t);
        unsigned s = state;
        for (std::size_t k = t; k-- > 0;) {
            bits[k] = static_cast<std::uint8_t>(s >> 5);
            s = table[s][tb[k][s]].pred;
        }
        return bits;
    };

    for (std::size_t t = 0; t < steps; ++t) {
        const int r0 = static_cast<int>(soft[2 * t]) - 128;
        const int r1 = static_cast<int>(soft[2 * t + 1]) - 128;
        const std::array<int, 4> bm = {r0 + r1, r0 - r1, -r0 + r1, -r0 - r1};
        for (unsigned ns = 0; ns < kStates; ++ns) {
            // Zero-tail: the last 6 steps only admit input bit 0.
            if (t >= info && (ns >> 5) != 0) {
                next[ns] = kNoPath;
                continue;
            }
            std::int64_t best = kNoPath;
            unsigned choice = 0;
            for (unsigned z = 0; z < 2; ++z) {
                const Trans& tr = table[ns][z];
                if (metric[tr.pred] == kNoPath) continue;
                const std::int64_t m =
                    metric[tr.pred] + bm[(tr.out0 << 1) | tr.out1];
                if (m > best) {
                    best = m;
                    choice = z;
                } else if (m == best && best != kNoPath && z != choice) {
                    // Tie: keep the lexicographically smaller prefix so the
                    // global winner is the lexicographically smallest frame.
                    if (survivor_bits(t, tr.pred) <
                        survivor_bits(t, table[ns][choice].pred))
                        choice = z;
                }
            }
            next[ns] = best;
            tb[t][ns] = static_cast<std::uint8_t>(choice);
        }
        metric.swap(next);
    }

    // Termination forces the all-zero state.
    BitVec bits = [&] {
        BitVec path(steps);
        unsigned s = 0;
        for (std::size_t k = steps; k-- > 0;) {
            path[k] = static_cast<std::uint8_t>(s >> 5);
            s = table[s][tb[k][s]].pred;
        }
        return path;
    }();
    bits.resize(info);
    return bits;
}

std::uint32_t crc32_bits(const BitVec& payload) {
    constexpr std::uint32_t kPoly = 0x04C11DB7u;
    std::uint32_t reg = 0xFFFFFFFFu;
    for (std::uint8_t bit : payload) {
        const std::uint32_t fb = ((reg >> 31) ^ (bit & 1u)) & 1u;
        reg = (reg << 1) ^ (fb ? kPoly : 0u);
    }
    return reg ^ 0xFFFFFFFFu;
}

BitVec append_crc(BitVec payload) {
    const std::uint32_t crc = crc32_bits(payload);
    for (int k = 31; k >= 0; --k)
        payload.push_back(static_cast<std::uint8_t>((crc >> k) & 1u));
    return payload;
}

namespace {

std::uint32_t read_crc_field(const BitVec& frame, std::size_t payload_len) {
    std::uint32_t v = 0;
    for (unsigned k = 0; k < kCrcBits; ++k)
        v = (v << 1) | frame[payload_len + k];
    return v;
}

}  // namespace

bool crc_check(const BitVec& frame) {
    if (frame.size() < kCrcBits) return false;
    const std::size_t n = frame.size() - kCrcBits;
    const BitVec payload(frame.begin(), frame.begin() + n);
    return crc32_bits(payload) == read_crc_field(frame, n);
}

bool crc_check_xor(const BitVec& frame) {
    if (frame.size() < kCrcBits) return false;
    const std::size_t n = frame.size() - kCrcBits;
    const BitVec payload(frame.begin(), frame.begin() + n);
    const std::uint32_t zero_crc = crc32_bits(BitVec(n, 0));
    return (crc32_bits(payload) ^ zero_crc) == read_crc_field(frame, n);
}

}  // namespace ncma
