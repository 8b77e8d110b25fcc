#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ncma/gf.hpp"

namespace ncma {

// Stream tags form a closed XOR algebra: A ^ AxorB = B and so on.
enum class Stream : std::uint8_t { A = 1, B = 2, AxorB = 3 };

const char* stream_name(Stream s);
Stream xor_streams(Stream a, Stream b);

// A MAC-layer message: K-symbol packets, L of them needed to decode.
// symbols is row-major K x L; symbol (k, j) is the k-th symbol of the
// j-th source column.
struct SourceMessage {
    unsigned K = 0;
    unsigned L = 0;
    Stream stream = Stream::A;
    std::vector<std::uint8_t> symbols;

    std::uint8_t& at(unsigned k, unsigned j) { return symbols[k * L + j]; }
    std::uint8_t at(unsigned k, unsigned j) const { return symbols[k * L + j]; }
    bool operator==(const SourceMessage&) const = default;
};

SourceMessage random_message(unsigned K, unsigned L, Stream stream,
                             std::mt19937_64& rng);
SourceMessage xor_messages(const SourceMessage& a, const SourceMessage& b);

// One PHY-layer payload: the index selects the generator row, so the
// packet carries the equation G_index * M^T.
struct CodedPacket {
    unsigned index = 0;  // 1..N
    Stream stream = Stream::A;
    std::vector<std::uint8_t> payload;  // K symbols

    bool operator==(const CodedPacket&) const = default;
};

CodedPacket encode_packet(const GaloisField& gf, const SourceMessage& m,
                          unsigned index);

// Solves for the message from any >= L packets with distinct indices and a
// common stream tag.  Throws std::runtime_error when fewer than L distinct
// indices are available, std::invalid_argument on mixed streams/sizes.
SourceMessage decode_message(const GaloisField& gf,
                             const std::vector<CodedPacket>& packets,
                             unsigned K, unsigned L);

// Symbol-wise XOR of two packets with the same index.  The stream tag of
// the result follows the tag algebra; XORing a packet with itself keeps
// the tag and yields an all-zero payload.
CodedPacket xor_packets(const CodedPacket& p, const CodedPacket& q);

// Wire form used in trace files: index (2 bytes big-endian), stream tag
// (1 byte), K payload bytes.
std::vector<std::uint8_t> serialize_packet(const CodedPacket& p);
CodedPacket parse_packet(const std::vector<std::uint8_t>& bytes);

}  // namespace ncma
