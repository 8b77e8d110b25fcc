#include "ncma/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace ncma {

Variant parse_variant(const std::string& name) {
    if (name == "su") return Variant::Su;
    if (name == "rmud") return Variant::Rmud;
    if (name == "sic") return Variant::Sic;
    if (name == "ncma-rmud") return Variant::NcmaRmud;
    if (name == "ncma-sic") return Variant::NcmaSic;
    if (name == "ncma-rmud-sic") return Variant::NcmaRmudSic;
    throw std::invalid_argument("unknown variant: " + name);
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Su: return "su";
        case Variant::Rmud: return "rmud";
        case Variant::Sic: return "sic";
        case Variant::NcmaRmud: return "ncma-rmud";
        case Variant::NcmaSic: return "ncma-sic";
        case Variant::NcmaRmudSic: return "ncma-rmud-sic";
    }
    return "?";
}

DecoderConfig decoder_for(Variant v, double alpha) {
    DecoderConfig d;
    d.alpha = alpha;
    switch (v) {
        case Variant::Su:
            d.use_rmud = true;  // unused; SU slots decode single-user
            d.use_sic = false;
            d.use_pnc = false;
            break;
        case Variant::Rmud:
            d.use_rmud = true, d.use_sic = false, d.use_pnc = false;
            break;
        case Variant::Sic:
            d.use_rmud = false, d.use_sic = true, d.use_pnc = false;
            break;
        case Variant::NcmaRmud:
            d.use_rmud = true, d.use_sic = false, d.use_pnc = true;
            break;
        case Variant::NcmaSic:
            d.use_rmud = false, d.use_sic = true, d.use_pnc = true;
            break;
        case Variant::NcmaRmudSic:
            d.use_rmud = true, d.use_sic = true, d.use_pnc = true;
            break;
    }
    return d;
}

MacVariant parse_mac_variant(const std::string& name) {
    if (name == "ncma") return MacVariant::Ncma;
    if (name == "mud-only") return MacVariant::MudOnly;
    if (name == "su-projection") return MacVariant::SuProjection;
    throw std::invalid_argument("unknown mac variant: " + name);
}

const char* mac_variant_name(MacVariant v) {
    switch (v) {
        case MacVariant::Ncma: return "ncma";
        case MacVariant::MudOnly: return "mud-only";
        case MacVariant::SuProjection: return "su-projection";
    }
    return "?";
}

std::vector<NodeConfig> SessionConfig::effective_nodes() const {
    if (!nodes.empty()) return nodes;
    return {{"A", snr_a_db, l_a}, {"B", snr_b_db, l_b}};
}

std::vector<std::array<unsigned, 2>> SessionConfig::effective_pairing() const {
    if (!pairing.empty()) return pairing;
    return {{0u, 1u}};
}

nlohmann::json config_to_json(const SessionConfig& cfg) {
    nlohmann::json j;
    j["snr_a_db"] = cfg.snr_a_db;
    j["snr_b_db"] = cfg.snr_b_db;
    j["l_a"] = cfg.l_a;
    j["l_b"] = cfg.l_b;
    auto nodes = nlohmann::json::array();
    for (const auto& n : cfg.nodes)
        nodes.push_back({{"name", n.name}, {"snr_db", n.snr_db}, {"l", n.l}});
    j["nodes"] = nodes;
    auto pairs = nlohmann::json::array();
    for (const auto& p : cfg.pairing) pairs.push_back({p[0], p[1]});
    j["pairing"] = pairs;
    j["k_symbols"] = cfg.k_symbols;
    j["gf_bits"] = cfg.gf_bits;
    j["n_beacons"] = cfg.n_beacons;
    j["slots_per_poll"] = cfg.slots_per_poll;
    j["variant"] = variant_name(cfg.variant);
    j["model"] = channel_model_name(cfg.model);
    j["block_len"] = cfg.block_len;
    j["alpha"] = cfg.alpha;
    j["sigma2"] = cfg.sigma2;
    j["noiseless"] = cfg.noiseless;
    j["seed"] = cfg.seed;
    return j;
}

SessionConfig config_from_json(const nlohmann::json& j) {
    SessionConfig cfg;
    cfg.snr_a_db = j.at("snr_a_db").get<double>();
    cfg.snr_b_db = j.at("snr_b_db").get<double>();
    cfg.l_a = j.at("l_a").get<unsigned>();
    cfg.l_b = j.at("l_b").get<unsigned>();
    for (const auto& n : j.at("nodes"))
        cfg.nodes.push_back({n.at("name").get<std::string>(),
                             n.at("snr_db").get<double>(),
                             n.at("l").get<unsigned>()});
    for (const auto& p : j.at("pairing"))
        cfg.pairing.push_back({p.at(0).get<unsigned>(), p.at(1).get<unsigned>()});
    cfg.k_symbols = j.at("k_symbols").get<unsigned>();
    cfg.gf_bits = j.at("gf_bits").get<unsigned>();
    cfg.n_beacons = j.at("n_beacons").get<unsigned>();
    cfg.slots_per_poll = j.at("slots_per_poll").get<unsigned>();
    cfg.variant = parse_variant(j.at("variant").get<std::string>());
    cfg.model = parse_channel_model(j.at("model").get<std::string>());
    cfg.block_len = j.at("block_len").get<unsigned>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.sigma2 = j.at("sigma2").get<double>();
    cfg.noiseless = j.at("noiseless").get<bool>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

std::string config_hash(const SessionConfig& cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::array<double, kEventGroupCount> SessionStats::group_freqs() const {
    std::array<double, kEventGroupCount> f{};
    if (total_slots == 0) return f;
    for (unsigned g = 0; g < kEventGroupCount; ++g)
        f[g] = static_cast<double>(group_counts[g]) / static_cast<double>(total_slots);
    return f;
}

double SessionStats::node_throughput(std::size_t node) const {
    if (total_slots == 0) return 0.0;
    return static_cast<double>(node_packets.at(node)) /
           static_cast<double>(total_slots);
}

double SessionStats::total_throughput() const {
    if (total_slots == 0) return 0.0;
    unsigned long sum = 0;
    for (auto v : node_packets) sum += v;
    return static_cast<double>(sum) / static_cast<double>(total_slots);
}

double SessionStats::bound() const { return upper_bound(group_freqs()); }

nlohmann::json SessionStats::to_json() const {
    nlohmann::json j;
    j["total_slots"] = total_slots;
    nlohmann::json groups;
    const auto f = group_freqs();
    for (unsigned g = 0; g < kEventGroupCount; ++g) {
        const char* name = group_name(static_cast<EventGroup>(g));
        groups[name] = {{"count", group_counts[g]}, {"freq", f[g]}};
    }
    j["groups"] = groups;
    nlohmann::json nodes;
    for (std::size_t n = 0; n < node_names.size(); ++n)
        nodes[node_names[n]] = {{"packets", node_packets[n]},
                                {"throughput", node_throughput(n)}};
    j["nodes"] = nodes;
    j["messages_solved"] = messages_solved;
    j["phy_native_packets"] = phy_native_packets;
    j["phy_xor_packets"] = phy_xor_packets;
    j["phy_bridged_packets"] = phy_bridged_packets;
    j["undetected"] = undetected;
    j["abandoned_rounds"] = abandoned_rounds;
    j["throughput"] = total_throughput();
    j["upper_bound"] = total_slots ? bound() : 0.0;
    return j;
}

double upper_bound(const std::array<double, kEventGroupCount>& f) {
    double sum = 0.0;
    for (double v : f) {
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("upper_bound: frequency out of [0,1]");
        sum += v;
    }
    if (sum > 1.0 + 1e-9)
        throw std::invalid_argument("upper_bound: frequencies sum to more than 1");
    return 2.0 * (f[static_cast<int>(EventGroup::AB)] +
                  f[static_cast<int>(EventGroup::AXorBX)]) +
           1.0 * (f[static_cast<int>(EventGroup::AOrB)] +
                  f[static_cast<int>(EventGroup::LoneXor)]);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t slot_seed(std::uint64_t session_seed, std::uint64_t slot) {
    return splitmix64(session_seed ^ splitmix64(slot + 1));
}

// MAC-side state of one polled pair, shared by the live session loop and
// trace replay so both follow identical solve/credit/rotation rules.
class PairMac {
public:
    PairMac(const GaloisField& gf, unsigned K, unsigned node_a, unsigned node_b,
            unsigned l_a, unsigned l_b, std::mt19937_64& msg_rng)
        : gf_(&gf),
          k_(K),
          node_{node_a, node_b},
          l_{l_a, l_b},
          store_(gf, K, l_a, l_b),
          rng_(&msg_rng) {
        msg_[0] = random_message(K, l_a, Stream::A, msg_rng);
        msg_[1] = random_message(K, l_b, Stream::B, msg_rng);
    }

    const SourceMessage& msg(int user) const { return msg_[user]; }
    EquationStore& store() { return store_; }
    unsigned slots_seen() const { return slots_seen_; }

    // Ingests one (bridged) outcome whose packets use `index`, then runs
    // the resolve/credit/rotate cycle.  `consumed` marks which streams
    // spent an index this slot (both for a two-user slot, one for SU).
    void step(const SlotOutcome& outcome, unsigned index,
              const std::array<bool, 2>& consumed, SessionStats& stats) {
        ++slots_seen_;
        for (int u = 0; u < 2; ++u)
            if (consumed[u]) ++used_[u];
        store_.ingest(outcome);
        store_.resolve();

        const bool a_done = store_.solved(Stream::A);
        const bool b_done = store_.solved(Stream::B);
        if (a_done && b_done) {
            credit(0, stats);
            credit(1, stats);
            new_message(0);
            new_message(1);
            store_.reset_rounds(index);
        } else if (a_done || b_done) {
            const int user = a_done ? 0 : 1;
            credit(user, stats);
            new_message(user);
            store_.rotate_pairing(a_done ? Stream::A : Stream::B, index);
        }

        for (int u = 0; u < 2; ++u) {
            // A round that has consumed all N indices without solving has
            // run out of fresh equations; restart it rather than reuse rows.
            if (used_[u] >= gf_->nonzero_count()) {
                new_message(u);
                store_.abandon_round(u == 0 ? Stream::A : Stream::B, index);
                used_[u] = 0;
                ++stats.abandoned_rounds;
            }
        }
    }

private:
    void credit(int user, SessionStats& stats) {
        stats.node_packets[node_[user]] += l_[user];
        ++stats.messages_solved;
        used_[user] = 0;
    }
    void new_message(int user) {
        msg_[user] = random_message(k_, l_[user],
                                    user == 0 ? Stream::A : Stream::B, *rng_);
    }

    const GaloisField* gf_;
    unsigned k_;
    std::array<unsigned, 2> node_;
    std::array<unsigned, 2> l_;
    std::array<SourceMessage, 2> msg_;
    EquationStore store_;
    std::mt19937_64* rng_;
    std::array<unsigned, 2> used_{0, 0};
    unsigned slots_seen_ = 0;
};

}  // namespace

SessionResult run_session(const SessionConfig& cfg) {
    const auto nodes = cfg.effective_nodes();
    const auto pairing = cfg.effective_pairing();
    if (pairing.empty()) throw std::invalid_argument("run_session: no pairs");
    for (const auto& p : pairing)
        if (p[0] >= nodes.size() || p[1] >= nodes.size() || p[0] == p[1])
            throw std::invalid_argument("run_session: bad pairing entry");
    if (cfg.n_beacons < 1 || cfg.slots_per_poll < 1)
        throw std::invalid_argument("run_session: beacons and slots_per_poll must be >= 1");
    if (cfg.k_symbols < 1)
        throw std::invalid_argument("run_session: k_symbols must be >= 1");

    const GaloisField gf(cfg.gf_bits);
    const unsigned N = gf.nonzero_count();
    const DecoderConfig dec = decoder_for(cfg.variant, cfg.alpha);
    std::mt19937_64 msg_rng(splitmix64(cfg.seed));

    SessionStats stats;
    stats.node_packets.assign(nodes.size(), 0);
    for (const auto& n : nodes) stats.node_names.push_back(n.name);

    Trace trace;
    trace.config = config_to_json(cfg);
    trace.config_hash = config_hash(cfg);

    std::vector<PairMac> macs;
    std::vector<std::array<unsigned, 2>> su_index;  // per-user next index (SU)
    std::vector<unsigned> pair_index;               // shared next index (two-user)
    macs.reserve(pairing.size());
    for (const auto& p : pairing) {
        macs.emplace_back(gf, cfg.k_symbols, p[0], p[1], nodes[p[0]].l,
                          nodes[p[1]].l, msg_rng);
        su_index.push_back({1u, 1u});
        pair_index.push_back(1u);
    }

    const unsigned long slots = cfg.total_slots();
    for (unsigned long slot = 0; slot < slots; ++slot) {
        const std::size_t pi = (slot / cfg.slots_per_poll) % pairing.size();
        PairMac& mac = macs[pi];
        const auto& pr = pairing[pi];

        const std::uint64_t seed = slot_seed(cfg.seed, slot);
        std::mt19937_64 ch_rng(seed);

        TraceRecord rec;
        rec.slot = slot;
        rec.pair = static_cast<unsigned>(pi);
        rec.channel_seed = seed;

        if (cfg.variant == Variant::Su) {
            const int user = static_cast<int>(mac.slots_seen() % 2);
            const unsigned index = su_index[pi][user];
            su_index[pi][user] = index % N + 1;
            const Stream stream = user == 0 ? Stream::A : Stream::B;

            const CodedPacket truth = encode_packet(gf, mac.msg(user), index);
            const auto coded = conv_encode(frame_bits(truth));
            ChannelConfig cc{nodes[pr[user]].snr_db, 0.0, cfg.model,
                             cfg.block_len, cfg.noiseless, cfg.sigma2};
            const ChannelUse ch = draw_channel(cc, coded.size(), false, ch_rng);
            const auto rx = transmit(bpsk_map(coded), {}, ch, ch_rng);
            auto pkt = decode_single_user(rx, ch, cfg.alpha, index,
                                          cfg.k_symbols, stream);

            SlotOutcome out;
            if (user == 0) out.a = pkt; else out.b = pkt;
            out.mud = pkt ? (user == 0 ? MudEvent::OnlyA : MudEvent::OnlyB)
                          : MudEvent::Neither;
            out.pnc = PncEvent::Failed;

            rec.index = index;
            rec.mud = out.mud;
            rec.pnc = out.pnc;
            rec.su_user = user;
            if (pkt) {
                rec.packets.push_back(*pkt);
                if (pkt->payload != truth.payload) {
                    rec.genie_ok = false;
                    ++stats.undetected;
                }
                ++stats.phy_native_packets;
            }
            ++stats.group_counts[static_cast<int>(out.group())];
            std::array<bool, 2> consumed{user == 0, user == 1};
            mac.step(out, index, consumed, stats);
        } else {
            const unsigned index = pair_index[pi];
            pair_index[pi] = index % N + 1;

            const CodedPacket truth_a = encode_packet(gf, mac.msg(0), index);
            const CodedPacket truth_b = encode_packet(gf, mac.msg(1), index);
            const auto coded_a = conv_encode(frame_bits(truth_a));
            const auto coded_b = conv_encode(frame_bits(truth_b));
            ChannelConfig cc{nodes[pr[0]].snr_db, nodes[pr[1]].snr_db, cfg.model,
                             cfg.block_len, cfg.noiseless, cfg.sigma2};
            const ChannelUse ch = draw_channel(cc, coded_a.size(), true, ch_rng);
            const auto rx = transmit(bpsk_map(coded_a), bpsk_map(coded_b), ch, ch_rng);

            SlotOutcome out = decode_slot(rx, ch, dec, index, cfg.k_symbols);

            bool genie_ok = true;
            if (out.a && out.a->payload != truth_a.payload) genie_ok = false;
            if (out.b && out.b->payload != truth_b.payload) genie_ok = false;
            if (out.x) {
                const CodedPacket truth_x = xor_packets(truth_a, truth_b);
                if (out.x->payload != truth_x.payload) genie_ok = false;
            }
            if (!genie_ok) ++stats.undetected;

            rec.index = index;
            rec.mud = out.mud;
            rec.pnc = out.pnc;
            rec.genie_ok = genie_ok;
            if (out.a) rec.packets.push_back(*out.a);
            if (out.b) rec.packets.push_back(*out.b);
            if (out.x) rec.packets.push_back(*out.x);
            stats.phy_native_packets += (out.a ? 1u : 0u) + (out.b ? 1u : 0u);
            stats.phy_xor_packets += out.x ? 1u : 0u;
            ++stats.group_counts[static_cast<int>(out.group())];

            out = phy_bridge(std::move(out));
            rec.bridged = out.bridged;
            if (out.bridged) ++stats.phy_bridged_packets;

            mac.step(out, index, {true, true}, stats);
        }
        ++stats.total_slots;
        trace.records.push_back(std::move(rec));
    }
    return {std::move(stats), std::move(trace)};
}

SessionStats replay_trace(const Trace& trace, const ReplayOverrides& ov) {
    SessionConfig cfg = config_from_json(trace.config);
    auto nodes = cfg.effective_nodes();
    const auto pairing = cfg.effective_pairing();
    if (ov.l_a || ov.l_b) {
        for (const auto& p : pairing) {
            if (ov.l_a) nodes[p[0]].l = *ov.l_a;
            if (ov.l_b) nodes[p[1]].l = *ov.l_b;
        }
    }

    const GaloisField gf(cfg.gf_bits);
    const unsigned N = gf.nonzero_count();
    std::mt19937_64 msg_rng(splitmix64(cfg.seed));

    SessionStats stats;
    stats.node_packets.assign(nodes.size(), 0);
    for (const auto& n : nodes) stats.node_names.push_back(n.name);

    std::vector<PairMac> macs;
    std::vector<std::array<unsigned, 2>> su_index;
    std::vector<unsigned> pair_index;
    for (const auto& p : pairing) {
        macs.emplace_back(gf, cfg.k_symbols, p[0], p[1], nodes[p[0]].l,
                          nodes[p[1]].l, msg_rng);
        su_index.push_back({1u, 1u});
        pair_index.push_back(1u);
    }

    for (const auto& rec : trace.records) {
        if (rec.pair >= macs.size())
            throw std::runtime_error("trace: corrupted record at slot " +
                                     std::to_string(rec.slot) + ": bad pair id");
        PairMac& mac = macs[rec.pair];

        // Presence flags from the recorded (pre-bridge) decoder outputs.
        bool a_present = false, b_present = false, x_present = false;
        for (const auto& p : rec.packets) {
            if (p.index != rec.index)
                throw std::runtime_error("trace: corrupted record at slot " +
                                         std::to_string(rec.slot) +
                                         ": packet index mismatch");
            if (p.stream == Stream::A) a_present = true;
            else if (p.stream == Stream::B) b_present = true;
            else x_present = true;
        }

        if (rec.su_user >= 0) {
            // Single-user slot: one stream consumes its own index.
            const int user = rec.su_user;
            const unsigned expect = su_index[rec.pair][user];
            if (rec.index != expect)
                throw std::runtime_error("trace: corrupted record at slot " +
                                         std::to_string(rec.slot) +
                                         ": index discontinuity");
            su_index[rec.pair][user] = expect % N + 1;

            SlotOutcome out;
            const bool present = user == 0 ? a_present : b_present;
            if (present) {
                auto pkt = encode_packet(gf, mac.msg(user), rec.index);
                if (user == 0) out.a = pkt; else out.b = pkt;
            }
            out.mud = present ? (user == 0 ? MudEvent::OnlyA : MudEvent::OnlyB)
                              : MudEvent::Neither;
            out.pnc = PncEvent::Failed;
            ++stats.group_counts[static_cast<int>(out.group())];
            stats.phy_native_packets += present ? 1u : 0u;
            if (!rec.genie_ok) ++stats.undetected;
            mac.step(out, rec.index, {user == 0, user == 1}, stats);
        } else {
            const unsigned expect = pair_index[rec.pair];
            if (rec.index != expect)
                throw std::runtime_error("trace: corrupted record at slot " +
                                         std::to_string(rec.slot) +
                                         ": index discontinuity");
            pair_index[rec.pair] = expect % N + 1;

            // Variant projection.
            if (ov.mac == MacVariant::MudOnly) {
                x_present = false;
            } else if (ov.mac == MacVariant::SuProjection) {
                const int scheduled = static_cast<int>(mac.slots_seen() % 2);
                if (scheduled == 0) b_present = false; else a_present = false;
                x_present = false;
            }

            SlotOutcome out;
            if (a_present) out.a = encode_packet(gf, mac.msg(0), rec.index);
            if (b_present) out.b = encode_packet(gf, mac.msg(1), rec.index);
            if (x_present)
                out.x = xor_packets(encode_packet(gf, mac.msg(0), rec.index),
                                    encode_packet(gf, mac.msg(1), rec.index));
            out.mud = a_present ? (b_present ? MudEvent::Both : MudEvent::OnlyA)
                                : (b_present ? MudEvent::OnlyB : MudEvent::Neither);
            out.pnc = x_present ? PncEvent::Decoded : PncEvent::Failed;
            ++stats.group_counts[static_cast<int>(out.group())];
            stats.phy_native_packets += (a_present ? 1u : 0u) + (b_present ? 1u : 0u);
            stats.phy_xor_packets += x_present ? 1u : 0u;
            if (!rec.genie_ok) ++stats.undetected;

            if (ov.mac == MacVariant::Ncma) {
                out = phy_bridge(std::move(out));
                if (out.bridged) ++stats.phy_bridged_packets;
            }
            mac.step(out, rec.index, {true, true}, stats);
        }
        ++stats.total_slots;
    }
    return stats;
}

}  // namespace ncma
