#include "ncma/erasure.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ncma {

const char* stream_name(Stream s) {
    switch (s) {
        case Stream::A: return "A";
        case Stream::B: return "B";
        case Stream::AxorB: return "AxorB";
    }
    return "?";
}

Stream xor_streams(Stream a, Stream b) {
    if (a == b) return a;  // payload XORs to zero; tag kept for the caller
    return static_cast<Stream>(static_cast<std::uint8_t>(a) ^
                               static_cast<std::uint8_t>(b));
}

SourceMessage random_message(unsigned K, unsigned L, Stream stream,
                             std::mt19937_64& rng) {
    SourceMessage m;
    m.K = K;
    m.L = L;
    m.stream = stream;
    m.symbols.resize(static_cast<std::size_t>(K) * L);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& s : m.symbols) s = static_cast<std::uint8_t>(dist(rng));
    return m;
}

SourceMessage xor_messages(const SourceMessage& a, const SourceMessage& b) {
    if (a.K != b.K || a.L != b.L)
        throw std::invalid_argument("xor_messages: dimension mismatch");
    SourceMessage m = a;
    m.stream = xor_streams(a.stream, b.stream);
    for (std::size_t i = 0; i < m.symbols.size(); ++i) m.symbols[i] ^= b.symbols[i];
    return m;
}

CodedPacket encode_packet(const GaloisField& gf, const SourceMessage& m,
                          unsigned index) {
    const auto row = generator_row(gf, index, m.L);
    CodedPacket p;
    p.index = index;
    p.stream = m.stream;
    p.payload.assign(m.K, 0);
    for (unsigned k = 0; k < m.K; ++k) {
        std::uint8_t acc = 0;
        for (unsigned j = 0; j < m.L; ++j) acc ^= gf.mul(row[j], m.at(k, j));
        p.payload[k] = acc;
    }
    return p;
}

SourceMessage decode_message(const GaloisField& gf,
                             const std::vector<CodedPacket>& packets,
                             unsigned K, unsigned L) {
    // Deduplicate by index; decoding is subset-independent so we simply use
    // the L lowest distinct indices.
    std::map<unsigned, const CodedPacket*> by_index;
    for (const auto& p : packets) {
        if (p.payload.size() != K)
            throw std::invalid_argument("decode_message: payload size != K");
        if (!by_index.empty() && p.stream != by_index.begin()->second->stream)
            throw std::invalid_argument("decode_message: mixed stream tags");
        by_index.emplace(p.index, &p);
    }
    if (by_index.size() < L)
        throw std::runtime_error("decode_message: insufficient packets (" +
                                 std::to_string(by_index.size()) + " of " +
                                 std::to_string(L) + " distinct indices)");

    std::vector<const CodedPacket*> use;
    for (const auto& [idx, p] : by_index) {
        use.push_back(p);
        if (use.size() == L) break;
    }

    GfMatrix g(L, L);
    for (unsigned r = 0; r < L; ++r) {
        const auto row = generator_row(gf, use[r]->index, L);
        for (unsigned j = 0; j < L; ++j) g.at(r, j) = row[j];
    }
    const GfMatrix ginv = gf_invert(gf, g);

    SourceMessage m;
    m.K = K;
    m.L = L;
    m.stream = use[0]->stream;
    m.symbols.assign(static_cast<std::size_t>(K) * L, 0);
    // M^T = G^-1 * C with C rows the selected payloads.
    for (unsigned j = 0; j < L; ++j)
        for (unsigned r = 0; r < L; ++r) {
            const std::uint8_t f = ginv.at(j, r);
            if (f == 0) continue;
            const auto& payload = use[r]->payload;
            for (unsigned k = 0; k < K; ++k) m.at(k, j) ^= gf.mul(f, payload[k]);
        }
    return m;
}

CodedPacket xor_packets(const CodedPacket& p, const CodedPacket& q) {
    if (p.index != q.index)
        throw std::invalid_argument("xor_packets: index mismatch");
    if (p.payload.size() != q.payload.size())
        throw std::invalid_argument("xor_packets: payload size mismatch");
    CodedPacket r;
    r.index = p.index;
    r.stream = xor_streams(p.stream, q.stream);
    r.payload.resize(p.payload.size());
    for (std::size_t i = 0; i < r.payload.size(); ++i)
        r.payload[i] = p.payload[i] ^ q.payload[i];
    return r;
}

std::vector<std::uint8_t> serialize_packet(const CodedPacket& p) {
    if (p.index > 0xFFFF)
        throw std::invalid_argument("serialize_packet: index exceeds 16 bits");
    std::vector<std::uint8_t> out;
    out.reserve(3 + p.payload.size());
    out.push_back(static_cast<std::uint8_t>(p.index >> 8));
    out.push_back(static_cast<std::uint8_t>(p.index & 0xFF));
    out.push_back(static_cast<std::uint8_t>(p.stream));
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    return out;
}

CodedPacket parse_packet(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 3)
        throw std::runtime_error("parse_packet: truncated packet record");
    const std::uint8_t tag = bytes[2];
    if (tag < 1 || tag > 3)
        throw std::runtime_error("parse_packet: unknown stream tag");
    CodedPacket p;
    p.index = (static_cast<unsigned>(bytes[0]) << 8) | bytes[1];
    p.stream = static_cast<Stream>(tag);
    p.payload.assign(bytes.begin() + 3, bytes.end());
    return p;
}

}  // namespace ncma
