#pragma once

#include <optional>
#include <string>

#include "ncma/channel.hpp"
#include "ncma/demod.hpp"
#include "ncma/erasure.hpp"

namespace ncma {

// Multi-user decoding outcome, events (i)..(iv).
enum class MudEvent : std::uint8_t { Both = 0, OnlyA = 1, OnlyB = 2, Neither = 3 };
// XOR decoding outcome, events (I)/(II).
enum class PncEvent : std::uint8_t { Decoded = 0, Failed = 1 };

// Slot groups used for statistics and the throughput bound.
enum class EventGroup : std::uint8_t { AB = 0, AXorBX = 1, AOrB = 2, LoneXor = 3, None = 4 };
inline constexpr unsigned kEventGroupCount = 5;

EventGroup classify(MudEvent mud, PncEvent pnc);
const char* group_name(EventGroup g);        // "AB", "AX|BX", "A|B", "X", "NONE"
std::string event_label(MudEvent m, PncEvent p);  // e.g. "(ii)(I)"

struct DecoderConfig {
    bool use_rmud = true;
    bool use_sic = false;
    bool use_pnc = true;
    double alpha = 0.228;
};

struct SlotOutcome {
    std::optional<CodedPacket> a;
    std::optional<CodedPacket> b;
    std::optional<CodedPacket> x;
    MudEvent mud = MudEvent::Neither;
    PncEvent pnc = PncEvent::Failed;
    bool bridged = false;  // a or b was filled from the complementary XOR

    EventGroup group() const { return classify(mud, pnc); }
};

// Runs the configured channel decoders on one two-user slot.  index is the
// generator row both users transmitted; k_symbols the packet payload size.
// A native packet is present iff its frame passed crc_check; x is present
// iff the XOR frame passed crc_check_xor.  The MUD result is the union of
// the enabled native decoders (RMUD, SIC).
SlotOutcome decode_slot(const std::vector<cplx>& rx, const ChannelUse& ch,
                        const DecoderConfig& cfg, unsigned index,
                        unsigned k_symbols);

// Successive interference cancellation, both orders in parallel: decode
// one user treating the other as noise; on CRC pass re-encode, subtract,
// and decode the residual as a single-user frame.  The result is the union
// of the two orders.
struct SicResult {
    std::optional<CodedPacket> a;
    std::optional<CodedPacket> b;
};
SicResult sic_decode(const std::vector<cplx>& rx, const ChannelUse& ch,
                     double alpha, unsigned index, unsigned k_symbols);

// PHY-layer bridging: in events (ii)(I)/(iii)(I) the missing native packet
// is the XOR of the decoded native and the XOR packet, making the slot
// equivalent to event (i) for packet delivery.  Event labels are kept so
// statistics still reflect the raw channel-decoder outcome.
SlotOutcome phy_bridge(SlotOutcome o);

// Single-user slot decode (matched filter), used by the SU benchmark.
std::optional<CodedPacket> decode_single_user(const std::vector<cplx>& rx,
                                              const ChannelUse& ch, double alpha,
                                              unsigned index, unsigned k_symbols,
                                              Stream stream);

// Frame composition shared by the simulator: packet payload bits + CRC.
BitVec frame_bits(const CodedPacket& p);

}  // namespace ncma
