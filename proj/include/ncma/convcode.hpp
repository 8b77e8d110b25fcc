#pragma once

#include <cstdint>
#include <vector>

namespace ncma {

// Bits are stored one per byte, value 0 or 1.
using BitVec = std::vector<std::uint8_t>;

BitVec bytes_to_bits(const std::vector<std::uint8_t>& bytes);  // MSB first
std::vector<std::uint8_t> bits_to_bytes(const BitVec& bits);

// Rate-1/2 convolutional code, constraint length 7, generators 133/171
// (octal).  Six zero tail bits are appended, so the output holds
// 2 * (frame.size() + 6) coded bits: for each input bit the 133-branch
// output comes first.
inline constexpr unsigned kConvTailBits = 6;
BitVec conv_encode(const BitVec& frame);

// Soft-input Viterbi decoder for conv_encode.  soft holds one quantized
// value (0..255) per coded bit; its length must be 2 * (info + 6) for some
// info >= 1.  The decoder maximizes sum soft'[k] * x[k] with
// soft' = soft - 128 and x = +1 for coded bit 0, -1 for coded bit 1, over
// all zero-tail-terminated input frames.  Metric ties are broken toward
// the lexicographically smallest information sequence (earlier bit 0
// preferred), so an exhaustive search applying the same rule returns the
// identical frame.  Returns the info bits (tail stripped).
BitVec viterbi_decode(const std::vector<std::uint8_t>& soft);

// CRC-32, polynomial 0x04C11DB7, init all-ones, final complement, applied
// bit-serially to the frame.  The checksum field is appended MSB first.
inline constexpr unsigned kCrcBits = 32;
std::uint32_t crc32_bits(const BitVec& payload);
BitVec append_crc(BitVec payload);

// Validates payload || crc32(payload).
bool crc_check(const BitVec& frame);

// Validates a frame formed as the bitwise XOR of two valid frames of equal
// length.  The CRC is affine, so the XOR of two checksums differs from the
// checksum of the XORed payload by the constant crc32(zero payload); this
// check compensates for that constant.  The transmitter side is untouched.
bool crc_check_xor(const BitVec& frame);

}  // namespace ncma
