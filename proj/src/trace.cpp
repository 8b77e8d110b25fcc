#include "ncma/trace.hpp"

#include <fstream>
#include <stdexcept>

namespace ncma {

std::string hex_encode(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

std::vector<std::uint8_t> hex_decode(const std::string& s) {
    if (s.size() % 2 != 0)
        throw std::runtime_error("hex_decode: odd-length string");
    auto nib = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
        throw std::runtime_error("hex_decode: invalid digit");
    };
    std::vector<std::uint8_t> out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
    return out;
}

nlohmann::json record_to_json(const TraceRecord& r) {
    nlohmann::json j;
    j["type"] = "slot";
    j["slot"] = r.slot;
    j["pair"] = r.pair;
    j["index"] = r.index;
    j["mud"] = static_cast<int>(r.mud);
    j["pnc"] = static_cast<int>(r.pnc);
    j["ev"] = event_label(r.mud, r.pnc);
    j["bridged"] = r.bridged;
    j["su"] = r.su_user;
    j["genie"] = r.genie_ok;
    j["seed"] = r.channel_seed;
    auto pkts = nlohmann::json::array();
    for (const auto& p : r.packets) pkts.push_back(hex_encode(serialize_packet(p)));
    j["pkts"] = pkts;
    return j;
}

TraceRecord record_from_json(const nlohmann::json& j) {
    TraceRecord r;
    r.slot = j.at("slot").get<std::uint64_t>();
    r.pair = j.at("pair").get<unsigned>();
    r.index = j.at("index").get<unsigned>();
    const int mud = j.at("mud").get<int>();
    const int pnc = j.at("pnc").get<int>();
    if (mud < 0 || mud > 3) throw std::runtime_error("bad mud event");
    if (pnc < 0 || pnc > 1) throw std::runtime_error("bad pnc event");
    r.mud = static_cast<MudEvent>(mud);
    r.pnc = static_cast<PncEvent>(pnc);
    r.bridged = j.at("bridged").get<bool>();
    r.su_user = j.at("su").get<int>();
    if (r.su_user < -1 || r.su_user > 1) throw std::runtime_error("bad su field");
    r.genie_ok = j.at("genie").get<bool>();
    r.channel_seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("pkts"))
        r.packets.push_back(parse_packet(hex_decode(s.get<std::string>())));
    return r;
}

void Trace::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);  // binary: stable newlines
    if (!out) throw std::runtime_error("Trace::write: cannot open " + path);
    nlohmann::json header;
    header["type"] = "header";
    header["version"] = kVersion;
    header["config"] = config;
    header["config_hash"] = config_hash;
    out << header.dump() << '\n';
    for (const auto& r : records) out << record_to_json(r).dump() << '\n';
    if (!out) throw std::runtime_error("Trace::write: write failed for " + path);
}

Trace Trace::read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("Trace::read: cannot open " + path);
    Trace t;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t expect_slot = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("trace line " + std::to_string(line_no) +
                                     ": invalid JSON (" + e.what() + ")");
        }
        const std::string type = j.value("type", "");
        if (type == "header") {
            if (have_header)
                throw std::runtime_error("trace line " + std::to_string(line_no) +
                                         ": duplicate header");
            if (j.value("version", 0u) != kVersion)
                throw std::runtime_error("trace: unsupported version");
            t.config = j.at("config");
            t.config_hash = j.value("config_hash", "");
            have_header = true;
            continue;
        }
        if (type != "slot")
            throw std::runtime_error("trace line " + std::to_string(line_no) +
                                     ": unknown record type '" + type + "'");
        if (!have_header)
            throw std::runtime_error("trace: slot record before header");
        TraceRecord r;
        try {
            r = record_from_json(j);
        } catch (const std::exception& e) {
            throw std::runtime_error("trace: corrupted record at slot " +
                                     std::to_string(expect_slot) + " (line " +
                                     std::to_string(line_no) + "): " + e.what());
        }
        if (r.slot != expect_slot)
            throw std::runtime_error("trace: slot " + std::to_string(r.slot) +
                                     " out of order (expected " +
                                     std::to_string(expect_slot) + ")");
        ++expect_slot;
        t.records.push_back(std::move(r));
    }
    if (!have_header) throw std::runtime_error("trace: missing header");
    return t;
}

}  // namespace ncma
