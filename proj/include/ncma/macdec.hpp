#pragma once

#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "ncma/erasure.hpp"
#include "ncma/phydec.hpp"

namespace ncma {

// How a stored equation was obtained; used by statistics and the
// conservation checks.
enum class PacketOrigin : std::uint8_t { PhyDecoded = 0, PhyBridged = 1, MacDerived = 2 };

// The receiver-side state for one user pair: the three equation systems
// Eq^A, Eq^B and Eq^{AxorB} plus the recovered messages.  Native messages
// decode once their system holds L_A (resp. L_B) distinct indices; the XOR
// message decodes at max(L_A, L_B), which is only meaningful when
// L_A == L_B — with unequal lengths M^A xor M^B is not defined and only
// per-index bridging applies, so the XOR-message solve is disabled.
class EquationStore {
public:
    EquationStore(const GaloisField& gf, unsigned K, unsigned L_a, unsigned L_b);

    // Inserts every packet present in a (phy-bridged) slot outcome.
    // Throws std::invalid_argument if a stream already holds the index.
    void ingest(const SlotOutcome& outcome);
    void insert(const CodedPacket& pkt, PacketOrigin origin);

    // Runs the solve/bridge fixed point:
    //   - solve a native system at its threshold;
    //   - once a native message is known, re-encode it at every stored XOR
    //     index and XOR-bridge the other stream;
    //   - solve the XOR system at its threshold (equal lengths only) and
    //     convert every lone native packet into its counterpart.
    // Iterates until no system grows.  Returns true if anything changed.
    bool resolve();

    bool solved(Stream s) const;
    const std::optional<SourceMessage>& message(Stream s) const;
    unsigned threshold(Stream s) const;
    bool xor_solve_enabled() const { return l_a_ == l_b_; }

    const std::map<unsigned, PacketOrigin>& origins(Stream s) const;
    std::size_t equation_count(Stream s) const;
    bool has_index(Stream s, unsigned index) const;

    // Starts the next message round after exactly one native stream
    // solved: that stream's equations and solved flag are cleared, the
    // surviving stream keeps its equations, and the XOR system is reset.
    // last_index is the slot index j of the solve; transmission resumes at
    // j + 1 (cyclic), which is recorded for round bookkeeping.
    // Throws std::logic_error when both or neither stream is solved.
    void rotate_pairing(Stream finished, unsigned last_index);

    // Clears everything for a brand-new pair of messages.
    void reset_rounds(unsigned last_index);

    // Drops an unsolved native round (sender exhausted all N indices) plus
    // the XOR system that paired it.  Throws if the stream is solved.
    void abandon_round(Stream abandoned, unsigned last_index);

    unsigned round_start(Stream s) const;  // first index of the current round

    nlohmann::json dump() const;  // state snapshot (indices + flags)

private:
    struct System {
        std::map<unsigned, CodedPacket> eqs;
        std::map<unsigned, PacketOrigin> origin;
        std::optional<SourceMessage> msg;
        unsigned start_index = 1;
    };

    System& sys(Stream s);
    const System& sys(Stream s) const;
    bool try_solve(Stream s);
    bool bridge_from(Stream solved_stream);
    bool convert_with_xor_message();

    const GaloisField* gf_;
    unsigned k_;
    unsigned l_a_, l_b_;
    System a_, b_, x_;
};

}  // namespace ncma
