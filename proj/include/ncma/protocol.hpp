#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncma/channel.hpp"
#include "ncma/macdec.hpp"
#include "ncma/trace.hpp"

namespace ncma {

// PHY/MAC decoder variants.  SU is the time-sharing benchmark: the pair
// members alternate slots and are decoded single-user.
enum class Variant { Su, Rmud, Sic, NcmaRmud, NcmaSic, NcmaRmudSic };

Variant parse_variant(const std::string& name);  // throws on unknown
const char* variant_name(Variant v);
DecoderConfig decoder_for(Variant v, double alpha);

struct NodeConfig {
    std::string name;
    double snr_db = 10.0;
    unsigned l = 16;  // message length in packets
};

struct SessionConfig {
    // Convenience two-node form; used when `nodes` is empty.
    double snr_a_db = 10.0;
    double snr_b_db = 10.0;
    unsigned l_a = 16;
    unsigned l_b = 16;

    // Explicit roster and pairing list; pairs are polled round-robin,
    // slots_per_poll consecutive slots per poll.
    std::vector<NodeConfig> nodes;
    std::vector<std::array<unsigned, 2>> pairing;

    unsigned k_symbols = 64;
    unsigned gf_bits = 8;
    unsigned n_beacons = 400;
    unsigned slots_per_poll = 3;
    Variant variant = Variant::NcmaRmud;
    ChannelModel model = ChannelModel::FixedPhase;
    unsigned block_len = 16;
    double alpha = 0.228;
    double sigma2 = 0.5;
    bool noiseless = false;
    std::uint64_t seed = 1;

    unsigned long total_slots() const {
        return static_cast<unsigned long>(n_beacons) * slots_per_poll;
    }
    // Roster with defaults applied.
    std::vector<NodeConfig> effective_nodes() const;
    std::vector<std::array<unsigned, 2>> effective_pairing() const;
};

nlohmann::json config_to_json(const SessionConfig& cfg);
SessionConfig config_from_json(const nlohmann::json& j);
std::string config_hash(const SessionConfig& cfg);  // FNV-1a of the dump

struct SessionStats {
    unsigned long total_slots = 0;
    std::array<unsigned long, kEventGroupCount> group_counts{};
    std::vector<std::string> node_names;
    std::vector<unsigned long> node_packets;  // credited MAC packets
    unsigned long messages_solved = 0;
    unsigned long phy_native_packets = 0;  // natives from the channel decoders
    unsigned long phy_xor_packets = 0;
    unsigned long phy_bridged_packets = 0;
    unsigned long undetected = 0;  // CRC passed but payload wrong (genie)
    unsigned long abandoned_rounds = 0;

    std::array<double, kEventGroupCount> group_freqs() const;
    double node_throughput(std::size_t node) const;
    double total_throughput() const;  // (sum of credited packets) / slots
    double bound() const;             // upper_bound(group_freqs())
    nlohmann::json to_json() const;

    bool operator==(const SessionStats&) const = default;
};

// Throughput upper bound from slot-group frequencies:
// 2 (Pr{AB} + Pr{AX|BX}) + 1 (Pr{A|B} + Pr{X}).  Frequencies must be
// nonnegative and sum to at most 1 (within rounding).
double upper_bound(const std::array<double, kEventGroupCount>& freqs);

struct SessionResult {
    SessionStats stats;
    Trace trace;
};

// Runs one simulated session: every slot the polled pair transmits the
// next generator index, the AP decodes per the configured variant, the
// equation systems resolve, and solved messages credit their L packets at
// the solve slot.  Deterministic for a fixed config (including seed).
SessionResult run_session(const SessionConfig& cfg);

// MAC re-decoding of a recorded trace under a variant override.
//   Ncma:         natives + XOR packets, PHY and MAC bridging (as live);
//   MudOnly:      XOR packets stripped, no bridging;
//   SuProjection: only the alternately-scheduled user's native per slot.
enum class MacVariant { Ncma, MudOnly, SuProjection };
MacVariant parse_mac_variant(const std::string& name);
const char* mac_variant_name(MacVariant v);

struct ReplayOverrides {
    MacVariant mac = MacVariant::Ncma;
    std::optional<unsigned> l_a;  // overrides the first pair member's L
    std::optional<unsigned> l_b;  // overrides the second pair member's L
};

SessionStats replay_trace(const Trace& trace, const ReplayOverrides& ov);

}  // namespace ncma
