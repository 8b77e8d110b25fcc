#include "ncma/phydec.hpp"

#include <stdexcept>

namespace ncma {

EventGroup classify(MudEvent mud, PncEvent pnc) {
    switch (mud) {
        case MudEvent::Both:
            return EventGroup::AB;
        case MudEvent::OnlyA:
        case MudEvent::OnlyB:
            return pnc == PncEvent::Decoded ? EventGroup::AXorBX : EventGroup::AOrB;
        case MudEvent::Neither:
            return pnc == PncEvent::Decoded ? EventGroup::LoneXor : EventGroup::None;
    }
    return EventGroup::None;
}

const char* group_name(EventGroup g) {
    switch (g) {
        case EventGroup::AB: return "AB";
        case EventGroup::AXorBX: return "AX|BX";
        case EventGroup::AOrB: return "A|B";
        case EventGroup::LoneXor: return "X";
        case EventGroup::None: return "NONE";
    }
    return "?";
}

std::string event_label(MudEvent m, PncEvent p) {
    static const char* mud_names[] = {"(i)", "(ii)", "(iii)", "(iv)"};
    return std::string(mud_names[static_cast<int>(m)]) +
           (p == PncEvent::Decoded ? "(I)" : "(II)");
}

BitVec frame_bits(const CodedPacket& p) {
    return append_crc(bytes_to_bits(p.payload));
}

namespace {

// Viterbi + CRC on one quantized soft stream; returns the payload bytes on
// a CRC pass.  xor_rule switches to the XOR-compensated CRC check.
std::optional<std::vector<std::uint8_t>> decode_frame(
    const std::vector<std::uint8_t>& soft, unsigned k_symbols, bool xor_rule) {
    const BitVec decoded = viterbi_decode(soft);
    if (decoded.size() != 8 * k_symbols + kCrcBits) return std::nullopt;
    const bool ok = xor_rule ? crc_check_xor(decoded) : crc_check(decoded);
    if (!ok) return std::nullopt;
    return bits_to_bytes(BitVec(decoded.begin(), decoded.end() - kCrcBits));
}

CodedPacket make_packet(unsigned index, Stream stream,
                        std::vector<std::uint8_t> payload) {
    CodedPacket p;
    p.index = index;
    p.stream = stream;
    p.payload = std::move(payload);
    return p;
}

std::optional<CodedPacket> rmud_user(const std::vector<cplx>& rx,
                                     const ChannelUse& ch, double alpha, int user,
                                     unsigned index, unsigned k_symbols) {
    const double h2 = hmax2_user(ch, user);
    if (h2 <= 0.0) return std::nullopt;  // dead channel, nothing to demodulate
    std::vector<double> soft(rx.size());
    for (std::size_t k = 0; k < rx.size(); ++k) {
        const MudSoft s = rmud_soft(rx[k], ch.gain_a[k], ch.gain_b[k]);
        soft[k] = user == 0 ? s.a : s.b;
    }
    const QuantizerParams q{alpha, h2};
    auto payload = decode_frame(quantize_frame(soft, q), k_symbols, false);
    if (!payload) return std::nullopt;
    return make_packet(index, user == 0 ? Stream::A : Stream::B,
                       std::move(*payload));
}

}  // namespace

SicResult sic_decode(const std::vector<cplx>& rx, const ChannelUse& ch,
                     double alpha, unsigned index, unsigned k_symbols) {
    if (!ch.two_user())
        throw std::invalid_argument("sic_decode: channel is single-user");

    auto stage1 = [&](int user) -> std::optional<CodedPacket> {
        // Matched filter with the other user treated as noise.
        const double h2 = hmax2_user(ch, user);
        if (h2 <= 0.0) return std::nullopt;
        const auto& h = user == 0 ? ch.gain_a : ch.gain_b;
        std::vector<double> soft(rx.size());
        for (std::size_t k = 0; k < rx.size(); ++k)
            soft[k] = single_user_soft(rx[k], h[k]);
        const QuantizerParams q{alpha, h2};
        auto payload = decode_frame(quantize_frame(soft, q), k_symbols, false);
        if (!payload) return std::nullopt;
        return make_packet(index, user == 0 ? Stream::A : Stream::B,
                           std::move(*payload));
    };
    auto stage2 = [&](int user, const CodedPacket& first)
        -> std::optional<CodedPacket> {
        // Cancel the decoded user, then decode the normalized residual.
        const auto& h_first = user == 0 ? ch.gain_b : ch.gain_a;
        const auto& h_self = user == 0 ? ch.gain_a : ch.gain_b;
        if (hmax2_user(ch, user) <= 0.0) return std::nullopt;
        const std::vector<double> x = bpsk_map(conv_encode(frame_bits(first)));
        std::vector<double> soft(rx.size());
        for (std::size_t k = 0; k < rx.size(); ++k) {
            if (std::norm(h_self[k]) <= 0.0) continue;  // erased sample
            const cplx resid = (rx[k] - h_first[k] * x[k]) / h_self[k];
            soft[k] = resid.real();
        }
        const QuantizerParams q{alpha, 1.0};  // residual channel has unit gain
        auto payload = decode_frame(quantize_frame(soft, q), k_symbols, false);
        if (!payload) return std::nullopt;
        return make_packet(index, user == 0 ? Stream::A : Stream::B,
                           std::move(*payload));
    };

    SicResult r;
    // Order 1: A first.
    if (auto a = stage1(0)) {
        r.a = a;
        if (auto b = stage2(1, *a)) r.b = b;
    }
    // Order 2: B first.
    if (auto b = stage1(1)) {
        if (!r.b) r.b = b;
        if (auto a = stage2(0, *b); a && !r.a) r.a = a;
    }
    return r;
}

SlotOutcome decode_slot(const std::vector<cplx>& rx, const ChannelUse& ch,
                        const DecoderConfig& cfg, unsigned index,
                        unsigned k_symbols) {
    if (!ch.two_user())
        throw std::invalid_argument("decode_slot: channel is single-user");
    if (rx.size() != ch.gain_a.size())
        throw std::invalid_argument("decode_slot: rx/gain length mismatch");
    if (!cfg.use_rmud && !cfg.use_sic)
        throw std::invalid_argument("decode_slot: no native decoder enabled");

    SlotOutcome o;
    if (cfg.use_rmud) {
        o.a = rmud_user(rx, ch, cfg.alpha, 0, index, k_symbols);
        o.b = rmud_user(rx, ch, cfg.alpha, 1, index, k_symbols);
    }
    if (cfg.use_sic) {
        const SicResult s = sic_decode(rx, ch, cfg.alpha, index, k_symbols);
        if (!o.a) o.a = s.a;
        if (!o.b) o.b = s.b;
    }
    if (cfg.use_pnc && hmax2_pnc(ch) > 0.0) {
        std::vector<double> soft(rx.size());
        for (std::size_t k = 0; k < rx.size(); ++k)
            soft[k] = pnc_soft(rx[k], ch.gain_a[k], ch.gain_b[k]);
        const QuantizerParams q{cfg.alpha, hmax2_pnc(ch)};
        if (auto payload = decode_frame(quantize_frame(soft, q), k_symbols, true))
            o.x = make_packet(index, Stream::AxorB, std::move(*payload));
    }

    o.mud = o.a ? (o.b ? MudEvent::Both : MudEvent::OnlyA)
                : (o.b ? MudEvent::OnlyB : MudEvent::Neither);
    o.pnc = o.x ? PncEvent::Decoded : PncEvent::Failed;
    return o;
}

SlotOutcome phy_bridge(SlotOutcome o) {
    if (o.x) {
        if (o.a && !o.b) {
            o.b = xor_packets(*o.a, *o.x);
            o.bridged = true;
        } else if (o.b && !o.a) {
            o.a = xor_packets(*o.b, *o.x);
            o.bridged = true;
        }
    }
    return o;
}

std::optional<CodedPacket> decode_single_user(const std::vector<cplx>& rx,
                                              const ChannelUse& ch, double alpha,
                                              unsigned index, unsigned k_symbols,
                                              Stream stream) {
    if (ch.two_user())
        throw std::invalid_argument("decode_single_user: channel is two-user");
    std::vector<double> soft(rx.size());
    for (std::size_t k = 0; k < rx.size(); ++k)
        soft[k] = single_user_soft(rx[k], ch.gain_a[k]);
    const QuantizerParams q{alpha, hmax2_user(ch, 0)};
    auto payload = decode_frame(quantize_frame(soft, q), k_symbols, false);
    if (!payload) return std::nullopt;
    return make_packet(index, stream, std::move(*payload));
}

}  // namespace ncma
