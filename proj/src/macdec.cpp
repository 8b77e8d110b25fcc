#include "ncma/macdec.hpp"

#include <stdexcept>

namespace ncma {

EquationStore::EquationStore(const GaloisField& gf, unsigned K, unsigned L_a,
                             unsigned L_b)
    : gf_(&gf), k_(K), l_a_(L_a), l_b_(L_b) {
    if (L_a < 1 || L_b < 1)
        throw std::invalid_argument("EquationStore: thresholds must be >= 1");
    if (L_a > gf.nonzero_count() || L_b > gf.nonzero_count())
        throw std::invalid_argument("EquationStore: threshold exceeds N");
}

EquationStore::System& EquationStore::sys(Stream s) {
    switch (s) {
        case Stream::A: return a_;
        case Stream::B: return b_;
        case Stream::AxorB: return x_;
    }
    throw std::invalid_argument("EquationStore: bad stream");
}

const EquationStore::System& EquationStore::sys(Stream s) const {
    return const_cast<EquationStore*>(this)->sys(s);
}

unsigned EquationStore::threshold(Stream s) const {
    switch (s) {
        case Stream::A: return l_a_;
        case Stream::B: return l_b_;
        case Stream::AxorB: return std::max(l_a_, l_b_);
    }
    throw std::invalid_argument("EquationStore: bad stream");
}

void EquationStore::insert(const CodedPacket& pkt, PacketOrigin origin) {
    if (pkt.payload.size() != k_)
        throw std::invalid_argument("EquationStore::insert: payload size != K");
    System& s = sys(pkt.stream);
    if (!s.eqs.emplace(pkt.index, pkt).second)
        throw std::invalid_argument("EquationStore::insert: duplicate index " +
                                    std::to_string(pkt.index) + " in stream " +
                                    stream_name(pkt.stream));
    s.origin.emplace(pkt.index, origin);
}

void EquationStore::ingest(const SlotOutcome& o) {
    if (o.a) insert(*o.a, o.bridged && o.mud == MudEvent::OnlyB
                              ? PacketOrigin::PhyBridged
                              : PacketOrigin::PhyDecoded);
    if (o.b) insert(*o.b, o.bridged && o.mud == MudEvent::OnlyA
                              ? PacketOrigin::PhyBridged
                              : PacketOrigin::PhyDecoded);
    if (o.x) insert(*o.x, PacketOrigin::PhyDecoded);
}

bool EquationStore::solved(Stream s) const { return sys(s).msg.has_value(); }

const std::optional<SourceMessage>& EquationStore::message(Stream s) const {
    return sys(s).msg;
}

const std::map<unsigned, PacketOrigin>& EquationStore::origins(Stream s) const {
    return sys(s).origin;
}

std::size_t EquationStore::equation_count(Stream s) const {
    return sys(s).eqs.size();
}

bool EquationStore::has_index(Stream s, unsigned index) const {
    return sys(s).eqs.count(index) > 0;
}

bool EquationStore::try_solve(Stream st) {
    System& s = sys(st);
    if (s.msg || s.eqs.size() < threshold(st)) return false;
    std::vector<CodedPacket> packets;
    packets.reserve(s.eqs.size());
    for (const auto& [idx, p] : s.eqs) packets.push_back(p);
    s.msg = decode_message(*gf_, packets, k_, threshold(st));
    return true;
}

bool EquationStore::bridge_from(Stream solved_stream) {
    // A known native message turns every stored XOR equation into an
    // equation for the other stream: C_i^other = C_i^solved xor C_i^x.
    const Stream other = solved_stream == Stream::A ? Stream::B : Stream::A;
    const System& src = sys(solved_stream);
    System& dst = sys(other);
    if (!src.msg) return false;
    bool changed = false;
    for (const auto& [idx, xpkt] : x_.eqs) {
        if (dst.eqs.count(idx)) continue;
        CodedPacket own = encode_packet(*gf_, *src.msg, idx);
        CodedPacket derived = xor_packets(own, xpkt);
        dst.eqs.emplace(idx, derived);
        dst.origin.emplace(idx, PacketOrigin::MacDerived);
        changed = true;
    }
    return changed;
}

bool EquationStore::convert_with_xor_message() {
    // With M^{AxorB} known, any lone native index yields its counterpart.
    if (!x_.msg) return false;
    bool changed = false;
    auto convert = [&](System& from, System& to, Stream to_stream) {
        for (const auto& [idx, pkt] : from.eqs) {
            if (to.eqs.count(idx)) continue;
            CodedPacket xpkt = encode_packet(*gf_, *x_.msg, idx);
            CodedPacket derived = xor_packets(pkt, xpkt);
            derived.stream = to_stream;
            to.eqs.emplace(idx, derived);
            to.origin.emplace(idx, PacketOrigin::MacDerived);
            changed = true;
        }
    };
    convert(a_, b_, Stream::B);
    convert(b_, a_, Stream::A);
    return changed;
}

bool EquationStore::resolve() {
    bool any = false;
    for (bool changed = true; changed;) {
        changed = false;
        changed |= try_solve(Stream::A);
        changed |= try_solve(Stream::B);
        if (xor_solve_enabled()) changed |= try_solve(Stream::AxorB);
        if (a_.msg) changed |= bridge_from(Stream::A);
        if (b_.msg) changed |= bridge_from(Stream::B);
        changed |= convert_with_xor_message();
        any |= changed;
    }
    return any;
}

void EquationStore::rotate_pairing(Stream finished, unsigned last_index) {
    if (finished != Stream::A && finished != Stream::B)
        throw std::invalid_argument("rotate_pairing: finished stream must be native");
    const bool a_done = a_.msg.has_value();
    const bool b_done = b_.msg.has_value();
    if (a_done == b_done)
        throw std::logic_error("rotate_pairing: exactly one native stream must be solved");
    if ((finished == Stream::A) != a_done)
        throw std::logic_error("rotate_pairing: named stream is not the solved one");

    System& s = sys(finished);
    s = System{};
    s.start_index = last_index % gf_->nonzero_count() + 1;
    x_ = System{};  // the XOR system pairs two specific messages
    x_.start_index = s.start_index;
}

void EquationStore::abandon_round(Stream abandoned, unsigned last_index) {
    if (abandoned != Stream::A && abandoned != Stream::B)
        throw std::invalid_argument("abandon_round: stream must be native");
    System& s = sys(abandoned);
    if (s.msg)
        throw std::logic_error("abandon_round: stream is already solved");
    s = System{};
    s.start_index = last_index % gf_->nonzero_count() + 1;
    x_ = System{};
    x_.start_index = s.start_index;
}

void EquationStore::reset_rounds(unsigned last_index) {
    const unsigned start = last_index % gf_->nonzero_count() + 1;
    a_ = System{};
    b_ = System{};
    x_ = System{};
    a_.start_index = b_.start_index = x_.start_index = start;
}

unsigned EquationStore::round_start(Stream s) const { return sys(s).start_index; }

nlohmann::json EquationStore::dump() const {
    auto sys_json = [](const System& s) {
        nlohmann::json j;
        j["indices"] = nlohmann::json::array();
        for (const auto& [idx, p] : s.eqs) j["indices"].push_back(idx);
        j["solved"] = s.msg.has_value();
        j["start_index"] = s.start_index;
        return j;
    };
    nlohmann::json j;
    j["A"] = sys_json(a_);
    j["B"] = sys_json(b_);
    j["AxorB"] = sys_json(x_);
    j["L_A"] = l_a_;
    j["L_B"] = l_b_;
    j["K"] = k_;
    return j;
}

}  // namespace ncma
