#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncma/phydec.hpp"

namespace ncma {

// One slot of a recorded session.  Packets hold the raw channel-decoder
// outputs (before PHY bridging) in the wire form from serialize_packet;
// `bridged` notes whether bridging filled a missing native afterwards.
struct TraceRecord {
    std::uint64_t slot = 0;
    unsigned pair = 0;
    unsigned index = 0;
    MudEvent mud = MudEvent::Neither;
    PncEvent pnc = PncEvent::Failed;
    bool bridged = false;
    int su_user = -1;  // -1: two-user slot; 0/1: the scheduled SU sender
    bool genie_ok = true;
    std::uint64_t channel_seed = 0;
    std::vector<CodedPacket> packets;
};

// A versioned JSON-lines session trace: one header line followed by one
// line per slot.
struct Trace {
    static constexpr unsigned kVersion = 1;

    nlohmann::json config;  // SessionConfig snapshot
    std::string config_hash;
    std::vector<TraceRecord> records;

    void write(const std::string& path) const;
    // Throws std::runtime_error naming the offending slot/line on any
    // malformed or inconsistent record.
    static Trace read(const std::string& path);
};

nlohmann::json record_to_json(const TraceRecord& r);
TraceRecord record_from_json(const nlohmann::json& j);

std::string hex_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> hex_decode(const std::string& s);

}  // namespace ncma
